#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace lowrank {

/// Thin SVD with tie metadata on the singular values. Truncation-based
/// operations are set-valued exactly when sigma_r == sigma_{r+1}; the tie
/// groups record where that happens so callers can flag it instead of
/// silently picking a member.
struct SvdFactorization {
  Eigen::MatrixXd U;      // n x q, orthonormal columns
  Eigen::VectorXd sigma;  // length q = min(n, m), nonincreasing, nonnegative
  Eigen::MatrixXd V;      // m x q, orthonormal columns
  // maximal blocks (start index, length) of singular values equal within tie_tol
  std::vector<std::pair<Eigen::Index, Eigen::Index>> tie_groups;
  double tie_tol = 0.0;

  Eigen::MatrixXd reconstruct() const;
};

/// Default tie tolerance: 1e-9 * max(sigma_1, 1).
double default_tie_tol(double sigma_1);

/// Deterministic thin SVD (Jacobi rotations; exact same output for the same
/// input bits). Pass tau_tie <= 0 to use the default tolerance.
SvdFactorization full_svd(const Eigen::MatrixXd& A, double tau_tie = 0.0);

struct RankTruncation {
  Eigen::MatrixXd matrix;
  bool tie = false;  // sigma_r == sigma_{r+1} within tolerance (sigma_{q+1} := 0)
};

/// Best rank-r approximation in Frobenius norm. When the choice is not unique
/// (tied singular values at the cut) returns the member given by the
/// deterministic SVD ordering and sets `tie`.
RankTruncation svd_r(const Eigen::MatrixXd& A, Eigen::Index r, double tau_tie = 0.0);
RankTruncation svd_r(const SvdFactorization& f, Eigen::Index r);

/// Number of singular values above rel_tol * sigma_1.
Eigen::Index numerical_rank(const Eigen::VectorXd& sigma, double rel_tol = 1e-8);
Eigen::Index numerical_rank(const Eigen::MatrixXd& A, double rel_tol = 1e-8);

/// Frobenius inner product trace(A^T B).
double inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
double frob_norm(const Eigen::MatrixXd& A);

}  // namespace lowrank
