#pragma once

#include "lowrank/gauges.hpp"
#include "lowrank/hankel.hpp"
#include "lowrank/prox.hpp"

#include <Eigen/Core>
#include <filesystem>
#include <variant>

namespace lowrank {

/// f2(M) = -<M, H> + 1/2 ||H||_F^2 + X_{M Hankel}. Together with
/// f1 = 1/2 ||M||_F^2 + X_{rank <= r} the composite objective is
/// 1/2 ||H - M||_F^2 on Hankel matrices of rank at most r.
struct HankelApprox {
  Eigen::MatrixXd H;
};

/// f2(M) = X_{M_ij = data_ij on the mask}.
struct Completion {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  Eigen::MatrixXd data;
};

/// f2(M) = 1/2 ||M - A||_F^2; the smooth term for forward-backward.
struct QuadraticFit {
  Eigen::MatrixXd A;
};

struct ProblemSpec {
  std::variant<HankelApprox, Completion, QuadraticFit> variant;

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  const char* name() const;

  static ProblemSpec hankel(Eigen::MatrixXd H);
  static ProblemSpec completion(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask,
                                Eigen::MatrixXd data);
  static ProblemSpec quadratic(Eigen::MatrixXd A);
};

/// prox_{gamma f2}(Z). Hankel: project Z + gamma H onto the Hankel subspace;
/// completion: overwrite the masked entries; quadratic: (Z + gamma A)/(1 + gamma).
/// Outputs are exactly feasible for the variant's indicator.
Eigen::MatrixXd f2_prox(const ProblemSpec& p, double gamma, const Eigen::MatrixXd& Z);

/// Gradient of f2 where it is smooth (quadratic fit only; others throw).
Eigen::MatrixXd f2_grad(const ProblemSpec& p, const Eigen::MatrixXd& X);
double f2_lipschitz(const ProblemSpec& p);

/// Distance of M from the variant's feasible set (0 for quadratic fit).
double f2_feasibility(const ProblemSpec& p, const Eigen::MatrixXd& M);

/// f2(M); +inf when M violates the indicator by more than
/// feas_tol * max(1, ||M||_F).
double f2_value(const ProblemSpec& p, const Eigen::MatrixXd& M, double feas_tol = 1e-8);

/// Residual of the inclusion G in subdifferential f2(X): 0 iff G is a valid
/// subgradient (up to the feasibility of X itself, which is included).
double f2_subgradient_residual(const ProblemSpec& p, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd& G);

struct ObjectiveValues {
  double nonconvex = 0.0;  // k(||M||_g) + f2(M), +inf when rank(M) > r or M infeasible
  double envelope = 0.0;   // k(||M||_{g,r*}) + f2(M)
};

ObjectiveValues objective_eval(const ProblemSpec& p, const ObjectiveSpec& spec,
                               const Eigen::MatrixXd& M, double rank_tol = 1e-8,
                               double feas_tol = 1e-8);

/// Envelope objective at a solution of the relaxed problem. At the relaxed
/// optimum this lower-bounds every feasible value of the non-convex
/// objective, with equality when the optimizer has rank <= r.
double lower_bound(const ProblemSpec& p, const ObjectiveSpec& spec, const Eigen::MatrixXd& M_star);

/// Problem files: "variant <tag>" then named matrix payloads; the Hankel
/// variant also accepts "generator v1,v2,...".
ProblemSpec read_problem(const std::filesystem::path& path);
void write_problem(const std::filesystem::path& path, const ProblemSpec& p);

}  // namespace lowrank
