#include "lowrank/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lowrank {

ObjectiveSpec ObjectiveSpec::half_square_l2(Eigen::Index r, double gamma) {
  return {ScalarConvexSpec::half_square(), GaugeSpec::l2(), r, gamma};
}

ObjectiveSpec ObjectiveSpec::identity_l2(Eigen::Index r, double gamma) {
  return {ScalarConvexSpec::identity(), GaugeSpec::l2(), r, gamma};
}

namespace {

void require_spec(const ObjectiveSpec& spec, const char* op) {
  if (!(spec.gamma > 0.0)) throw std::invalid_argument(std::string(op) + ": gamma must be > 0");
  if (spec.g.kind != GaugeKind::L2)
    throw std::invalid_argument(std::string(op) + ": only the l2 gauge is enabled");
}

void require_half_square(const ObjectiveSpec& spec, const char* op) {
  if (spec.k.kind != ScalarKind::HalfSquare)
    throw std::invalid_argument(std::string(op) +
                                ": only available for the half-square scalar term");
}

}  // namespace

Eigen::MatrixXd prox_scaled_gauge(const ObjectiveSpec& spec, const Eigen::MatrixXd& P) {
  require_spec(spec, "prox_scaled_gauge");
  switch (spec.k.kind) {
    case ScalarKind::HalfSquare:
      return P / (1.0 + spec.gamma);
    case ScalarKind::Identity: {
      const double n = P.norm();  // block soft threshold of the Frobenius norm
      if (n <= spec.gamma) return Eigen::MatrixXd::Zero(P.rows(), P.cols());
      return (1.0 - spec.gamma / n) * P;
    }
  }
  throw std::logic_error("prox_scaled_gauge: unknown scalar kind");
}

RankTruncation prox_nonconvex_rank(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z) {
  require_spec(spec, "prox_nonconvex_rank");
  RankTruncation t = svd_r(Z, spec.r);
  t.matrix = prox_scaled_gauge(spec, t.matrix);
  return t;
}

// min_y c/2 sum_{i<=r} y_i^2 + 1/2 ||y - w||^2 over nonincreasing nonnegative
// y (which is where the minimizer of the unordered problem lives when w is
// sorted). Off the rank cut the terms separate: y_i = w_i/(1+c) for i <= r and
// y_i = w_i past it. The only possible order violation is at the cut, so the
// minimizer pools one block [a, b] spanning it onto a common value t with
// stationarity t (len + c * |[a,b] cap [1,r]|) = sum_{i in [a,b]} w_i. All
// O(q^2) blocks are enumerated and the feasible one with the smallest
// objective wins, which is exact.
Eigen::VectorXd conjugate_prox_sigma(const Eigen::VectorXd& w, Eigen::Index r, double c) {
  const Eigen::Index q = w.size();
  if (r < 1 || r > q) throw std::invalid_argument("conjugate_prox_sigma: 1 <= r <= q required");
  if (!(c > 0.0)) throw std::invalid_argument("conjugate_prox_sigma: c must be > 0");

  Eigen::VectorXd base(q);
  for (Eigen::Index i = 0; i < q; ++i) base(i) = i < r ? w(i) / (1.0 + c) : w(i);

  const double slack = 1e-12 * std::max(1.0, w.size() ? w(0) : 0.0);
  const auto objective = [&](const Eigen::VectorXd& y) {
    return 0.5 * c * y.head(r).squaredNorm() + 0.5 * (y - w).squaredNorm();
  };

  Eigen::VectorXd best_y;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = r - 1; b < q; ++b) {
      const Eigen::Index len = b - a + 1;
      const Eigen::Index top = r - a;  // block members subject to the quadratic term
      const double t = w.segment(a, len).sum() / (static_cast<double>(len) + c * top);
      if (a > 0 && base(a - 1) < t - slack) continue;
      if (b < q - 1 && t < w(b + 1) - slack) continue;
      Eigen::VectorXd y = base;
      y.segment(a, len).setConstant(t);
      const double obj = objective(y);
      if (obj < best) {
        best = obj;
        best_y = std::move(y);
      }
    }
  }
  return best_y;
}

Eigen::MatrixXd prox_conjugate(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z) {
  require_spec(spec, "prox_conjugate");
  require_half_square(spec, "prox_conjugate");
  const SvdFactorization f = full_svd(Z);
  const Eigen::VectorXd y = conjugate_prox_sigma(f.sigma / spec.gamma, spec.r, 1.0 / spec.gamma);
  return f.U * y.asDiagonal() * f.V.transpose();
}

Eigen::MatrixXd prox_envelope(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z) {
  require_spec(spec, "prox_envelope");
  require_half_square(spec, "prox_envelope");
  const SvdFactorization f = full_svd(Z);
  const Eigen::VectorXd y = conjugate_prox_sigma(f.sigma / spec.gamma, spec.r, 1.0 / spec.gamma);
  const Eigen::VectorXd m = f.sigma - spec.gamma * y;  // Moreau on the singular values
  return f.U * m.asDiagonal() * f.V.transpose();
}

double moreau_check(const ObjectiveSpec& spec, const Eigen::MatrixXd& Z) {
  return (prox_envelope(spec, Z) + spec.gamma * prox_conjugate(spec, Z) - Z).norm();
}

ProxEquivalenceReport prox_equivalence_conditions(const ObjectiveSpec& spec,
                                                  const Eigen::MatrixXd& Z) {
  require_spec(spec, "prox_equivalence_conditions");
  require_half_square(spec, "prox_equivalence_conditions");
  ProxEquivalenceReport rep;
  rep.M_c = prox_envelope(spec, Z);
  RankTruncation nc = prox_nonconvex_rank(spec, Z);
  rep.M_n = std::move(nc.matrix);
  rep.tie = nc.tie;

  const Eigen::VectorXd sig_z = full_svd(Z).sigma;
  const Eigen::VectorXd sig_res = full_svd(Z - rep.M_c).sigma;
  const Eigen::Index q = sig_z.size();
  const Eigen::Index r = spec.r;
  const double tol = 1e-8 * std::max(1.0, sig_z(0));

  rep.cond_i = (rep.M_c - rep.M_n).norm() <= tol;
  const Eigen::VectorXd sig_mc = full_svd(rep.M_c).sigma;
  Eigen::Index rank_mc = 0;
  while (rank_mc < q && sig_mc(rank_mc) > tol) ++rank_mc;
  rep.cond_ii = rank_mc <= r;
  rep.cond_iii = true;
  for (Eigen::Index i = r; i < q; ++i)
    rep.cond_iii = rep.cond_iii && std::abs(sig_res(i) - sig_z(i)) <= tol;
  const double sigma_r1_z = r < q ? sig_z(r) : 0.0;
  rep.cond_iv = sig_res(r - 1) >= sigma_r1_z - tol;
  rep.gap = sig_res(r - 1) - sigma_r1_z;
  return rep;
}

}  // namespace lowrank
