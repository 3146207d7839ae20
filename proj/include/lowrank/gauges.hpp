#pragma once

#include <Eigen/Core>
#include <functional>

namespace lowrank {

enum class GaugeKind { L2 };

/// Symmetric gauge function g together with its dual g^D, both evaluated on
/// vectors of singular values. Only the l2 gauge ships enabled; the hooks
/// spell out the contract for adding more: they must accept any vector of
/// length <= q (shorter input means trailing zeros), be permutation and sign
/// invariant, and satisfy the norm axioms.
struct GaugeSpec {
  GaugeKind kind = GaugeKind::L2;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<double(const Eigen::VectorXd&)> dual;

  static GaugeSpec l2();
};

enum class ScalarKind { HalfSquare, Identity };

/// Increasing closed convex scalar function k on [0, inf) and its monotone
/// conjugate k+(s) = sup_{t>=0} (st - k(t)). Infinite conjugate values are
/// IEEE +inf, which saturates correctly under addition and comparison.
struct ScalarConvexSpec {
  ScalarKind kind = ScalarKind::HalfSquare;
  std::function<double(double)> value;
  std::function<double(double)> conjugate;

  static ScalarConvexSpec half_square();  // k(t) = t^2 / 2
  static ScalarConvexSpec identity();     // k(t) = t
};

/// g applied to the singular values of A (for l2 the Frobenius norm).
double gauge_eval(const GaugeSpec& g, const Eigen::MatrixXd& A);

/// g^D applied to the r largest singular values of A.
double truncated_dual_gauge_eval(const GaugeSpec& g, Eigen::Index r, const Eigen::MatrixXd& A);

/// The norm dual to the truncated dual gauge: the tightest convex lower bound
/// of the gauge on matrices of rank <= r. Coincides with gauge_eval on
/// rank-<= r inputs and grows as r shrinks (r = 1, l2 gives the nuclear norm).
double low_rank_inducing_norm_eval(const GaugeSpec& g, Eigen::Index r, const Eigen::MatrixXd& A);

/// Same value computed directly from a nonincreasing nonnegative vector of
/// singular values (l2 gauge).
double low_rank_inducing_norm_sigma(Eigen::Index r, const Eigen::VectorXd& sigma);

/// k+(s) for s >= 0.
double monotone_conjugate_eval(const ScalarConvexSpec& k, double s);

}  // namespace lowrank
