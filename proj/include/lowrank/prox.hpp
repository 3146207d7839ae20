#pragma once

#include "lowrank/gauges.hpp"
#include "lowrank/svd.hpp"

#include <Eigen/Core>

namespace lowrank {

/// Data of the first splitting term: f1(M) = k(||M||_g) + X_{rank <= r},
/// scaled by the prox step gamma. Its convex envelope replaces the gauge by
/// the rank-r inducing norm: f1**(M) = k(||M||_{g,r*}).
struct ObjectiveSpec {
  ScalarConvexSpec k;
  GaugeSpec g;
  Eigen::Index r = 1;
  double gamma = 1.0;

  static ObjectiveSpec half_square_l2(Eigen::Index r, double gamma);
  static ObjectiveSpec identity_l2(Eigen::Index r, double gamma);
};

/// prox_{gamma k(||.||_g)}(P). Closed forms for the enabled pairs:
/// half-square/l2 scales by 1/(1+gamma), identity/l2 soft-thresholds the
/// Frobenius norm.
Eigen::MatrixXd prox_scaled_gauge(const ObjectiveSpec& spec, const Eigen::MatrixXd& P);

/// One member of prox_{gamma f1}(Z) = prox_{gamma k(||.||_g)}(svd_r(Z)),
/// with the truncation tie flag.
RankTruncation prox_nonconvex_rank(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z);

/// prox of the conjugate term gamma^{-1} k+(||.||_{g^D,r}) at gamma^{-1} Z.
/// On singular values this is the vector problem
///   min_y  c/2 * (sum of the r largest sorted y_i^2) + 1/2 ||y - w||^2
/// with c = 1/gamma and w = sigma(Z)/gamma, solved exactly by pooling a block
/// of values around the rank cut (half-square/l2 only).
Eigen::MatrixXd prox_conjugate(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z);

/// Exact solver for the vector problem above. w must be nonincreasing and
/// nonnegative; the minimizer is again nonincreasing and nonnegative.
Eigen::VectorXd conjugate_prox_sigma(const Eigen::VectorXd& w, Eigen::Index r, double c);

/// prox_{gamma f1**}(Z), computed through the conjugate prox via the Moreau
/// decomposition Z = M + gamma * prox_conjugate(Z) (half-square/l2 only).
Eigen::MatrixXd prox_envelope(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z);

/// Residual ||prox_envelope(Z) + gamma * prox_conjugate(Z) - Z||_F of the
/// Moreau decomposition, recomputed from scratch as a runtime cross-check.
/// Should be <= 1e-8 * max(1, ||Z||_F).
double moreau_check(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z);

/// When does the convex-envelope prox solve the non-convex problem? The four
/// conditions are checked at tolerance 1e-8 * max(1, sigma_1(Z)):
///   i   the envelope prox M^c is a member of prox_{gamma f1}(Z)
///   ii  rank(M^c) <= r
///   iii sigma_{r+j}(Z - M^c) == sigma_{r+j}(Z) for all j >= 1
///   iv  sigma_r(Z - M^c) >= sigma_{r+1}(Z)
/// They hold or fail together away from the degenerate boundary
/// sigma_r(Z - M^c) == sigma_{r+1}(Z); `gap` measures the distance to it.
struct ProxEquivalenceReport {
  bool cond_i = false, cond_ii = false, cond_iii = false, cond_iv = false;
  Eigen::MatrixXd M_c;  // envelope prox
  Eigen::MatrixXd M_n;  // non-convex prox member
  double gap = 0.0;     // sigma_r(Z - M^c) - sigma_{r+1}(Z)
  bool tie = false;     // svd_r tie at the cut

  bool all() const { return cond_i && cond_ii && cond_iii && cond_iv; }
  bool agree() const { return cond_i == cond_ii && cond_ii == cond_iii && cond_iii == cond_iv; }
};

ProxEquivalenceReport prox_equivalence_conditions(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z);

}  // namespace lowrank
