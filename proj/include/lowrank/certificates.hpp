#pragma once

#include "lowrank/solver.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

namespace lowrank {

/// Certificate built from a primal-dual pair of a converged run:
/// D* = (Z* - M*)/gamma. A spectral gap at the rank cut (or sigma_r = 0)
/// guarantees the relaxation solved the non-convex problem locally, and
/// epsilon = gamma (sigma_r(D*) - sigma_{r+1}(D*)) is the radius of a ball
/// around Z* on which the convex and non-convex iterations coincide.
struct DualCertificate {
  Eigen::MatrixXd D_star;
  Eigen::Index r = 0;
  double gamma = 0.0;
  double sigma_r = 0.0;
  double sigma_r_plus_1 = 0.0;        // 0 when r = q
  Eigen::Index tie_multiplicity = 0;  // s: largest s with sigma_r == ... == sigma_{r+s}
  double epsilon = 0.0;
  bool low_rank_guarantee = false;    // sigma_r - sigma_{r+1} > tie_tol, or sigma_r <= tie_tol
  double tie_tol = 0.0;
};

DualCertificate dual_from_primal(const Eigen::MatrixXd& Z_star, const Eigen::MatrixXd& M_star,
                                 double gamma, Eigen::Index r, double tau_tie = 0.0);

/// rank(M*) <= r + s, the bound implied by the certificate's tie multiplicity.
bool rank_bound_check(const Eigen::MatrixXd& M_star, const DualCertificate& cert,
                      double rank_rel_tol = 1e-8);

enum class LimitPointMode { Convex, NonConvex };

/// Residual of the inclusion G in subdifferential f2(X); supplied by the
/// problem (f2_subgradient_residual bound to a ProblemSpec).
using SubgradientTest = std::function<double(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;

/// Fixed-point conditions a DR limit point must satisfy. Both modes recover
/// R = (Z* - (1+gamma) X*)/gamma and require R^T X* = 0, X* R^T = 0 and
/// -X* - R in subdifferential f2(X*); they differ in the admissible size of R:
///   convex      sigma_1(R) <= sigma_r(X*)
///   non-convex  sigma_1(R) <= (1 + 1/gamma) sigma_r(X*)
/// The characterization only covers candidates with rank(X*) <= r; the check
/// rejects higher-rank inputs (numerical rank above r at rank_rel_tol), since
/// the conditions say nothing about them.
struct LimitPointReport {
  Eigen::MatrixXd R;
  double orth_left = 0.0;         // ||R^T X*||_F
  double orth_right = 0.0;        // ||X* R^T||_F
  double subgrad_residual = 0.0;  // residual of -X* - R in subdiff f2(X*)
  double sigma1_R = 0.0;
  double sigma_r_X = 0.0;
  double sigma_bound = 0.0;       // admissible upper bound for sigma_1(R)
  bool sigma_bound_ok = false;
  LimitPointMode mode = LimitPointMode::NonConvex;

  double max_residual() const;    // max of the three residuals
  bool pass(double tol) const;    // residuals <= tol and bound holds
};

LimitPointReport dr_limit_point_check(const Eigen::MatrixXd& X_star, const Eigen::MatrixXd& Z_star,
                                      double gamma, Eigen::Index r, LimitPointMode mode,
                                      const SubgradientTest& subgrad, double bound_tol = 1e-6,
                                      double rank_rel_tol = 1e-8);

struct AttractionConfig {
  int trials = 20;
  double radius_scale = 0.9;  // sample at radius_scale * epsilon
  std::uint64_t seed = 1;
  SolverConfig solver;        // z0 is replaced by each sample
  double z_tol = 1e-6;        // required distance to Z*, relative to max(1, ||Z*||)
  double eq_tol = 1e-8;       // tolerance for X^c_k == X^n_k
};

struct AttractionTrial {
  double initial_distance = 0.0;
  double final_distance = 0.0;    // terminal ||Z - Z*||
  double final_x_distance = 0.0;  // terminal ||X - (Z* - gamma D*)||, the primal reference
  bool reached_reference = false;
  bool iterates_coincide = false;
  SolveStatus status = SolveStatus::MaxIterReached;
  long iterations = 0;
};

struct AttractionReport {
  double epsilon = 0.0;
  std::vector<AttractionTrial> trials;
  int passed = 0;
  bool pass = true;  // vacuous for zero trials
};

/// Sample starting points uniformly in the ball of radius
/// radius_scale * epsilon around Z*, run the convex and non-convex DR in
/// lockstep from each, and verify that the two produce identical iterates and
/// land back on Z*. Requires cert.epsilon > 0 when trials > 0.
AttractionReport attraction_ball_test(const ProxFn& prox_convex, const ProxFn& prox_nonconvex,
                                      const ProxFn& prox_f2, const DualCertificate& cert,
                                      const Eigen::MatrixXd& Z_star, const AttractionConfig& cfg);

}  // namespace lowrank
