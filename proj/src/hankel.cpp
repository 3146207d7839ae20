#include "lowrank/hankel.hpp"

#include <algorithm>
#include <stdexcept>

namespace lowrank {

Eigen::MatrixXd hankel_project(const Eigen::MatrixXd& A) {
  if (A.rows() < 1 || A.cols() < 1)
    throw std::invalid_argument("hankel_project: matrix must be at least 1 x 1");
  if (A.rows() != A.cols())
    throw std::invalid_argument("hankel_project: expected a square matrix");
  const Eigen::Index n = A.rows();
  Eigen::VectorXd mean(2 * n - 1);
  for (Eigen::Index k = 0; k < 2 * n - 1; ++k) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, k - n + 1);
    const Eigen::Index hi = std::min<Eigen::Index>(k, n - 1);
    double s = 0.0;
    for (Eigen::Index i = lo; i <= hi; ++i) s += A(i, k - i);
    mean(k) = s / static_cast<double>(hi - lo + 1);
  }
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) P(i, j) = mean(i + j);
  return P;
}

double hankel_distance(const Eigen::MatrixXd& A) { return (A - hankel_project(A)).norm(); }

Eigen::MatrixXd hankel_from_generator(const Eigen::VectorXd& h) {
  if (h.size() < 1 || h.size() % 2 == 0)
    throw std::invalid_argument("hankel_from_generator: generator length must be odd (2n - 1)");
  const Eigen::Index n = (h.size() + 1) / 2;
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) H(i, j) = h(i + j);
  return H;
}

Eigen::MatrixXd build_triangle_hankel(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("build_triangle_hankel: n must be positive");
  Eigen::VectorXd h = Eigen::VectorXd::Zero(2 * n - 1);
  h.head(n).setOnes();
  return hankel_from_generator(h);
}

}  // namespace lowrank
