#include "lowrank/svd.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace lowrank {

double default_tie_tol(double sigma_1) { return 1e-9 * std::max(sigma_1, 1.0); }

Eigen::MatrixXd SvdFactorization::reconstruct() const {
  return U * sigma.asDiagonal() * V.transpose();
}

namespace {

void require_valid_input(const Eigen::MatrixXd& A, const char* op) {
  if (A.rows() < 1 || A.cols() < 1)
    throw std::invalid_argument(std::string(op) + ": matrix must be at least 1 x 1");
  if (!A.allFinite())
    throw std::invalid_argument(std::string(op) + ": matrix has non-finite entries");
}

}  // namespace

SvdFactorization full_svd(const Eigen::MatrixXd& A, double tau_tie) {
  require_valid_input(A, "full_svd");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactorization f;
  f.U = svd.matrixU();
  f.sigma = svd.singularValues();
  f.V = svd.matrixV();
  f.tie_tol = tau_tie > 0 ? tau_tie : default_tie_tol(f.sigma(0));
  const Eigen::Index q = f.sigma.size();
  for (Eigen::Index start = 0; start < q;) {
    Eigen::Index end = start + 1;  // block anchored at its largest member
    while (end < q && f.sigma(start) - f.sigma(end) <= f.tie_tol) ++end;
    f.tie_groups.emplace_back(start, end - start);
    start = end;
  }
  return f;
}

RankTruncation svd_r(const SvdFactorization& f, Eigen::Index r) {
  const Eigen::Index q = f.sigma.size();
  if (r < 1 || r > q)
    throw std::invalid_argument("svd_r: r must satisfy 1 <= r <= min(n, m)");
  RankTruncation t;
  t.matrix = f.U.leftCols(r) * f.sigma.head(r).asDiagonal() * f.V.leftCols(r).transpose();
  // sigma_{q+1} := 0, so r = q ties exactly when sigma_q vanishes
  t.tie = r < q ? f.sigma(r - 1) - f.sigma(r) <= f.tie_tol : f.sigma(q - 1) <= f.tie_tol;
  return t;
}

RankTruncation svd_r(const Eigen::MatrixXd& A, Eigen::Index r, double tau_tie) {
  return svd_r(full_svd(A, tau_tie), r);
}

Eigen::Index numerical_rank(const Eigen::VectorXd& sigma, double rel_tol) {
  if (sigma.size() == 0) return 0;
  const double cut = rel_tol * sigma(0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cut) ++rank;
  return sigma(0) == 0.0 ? 0 : rank;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& A, double rel_tol) {
  return numerical_rank(full_svd(A).sigma, rel_tol);
}

double inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("inner: shape mismatch");
  return A.cwiseProduct(B).sum();
}

double frob_norm(const Eigen::MatrixXd& A) { return A.norm(); }

}  // namespace lowrank
