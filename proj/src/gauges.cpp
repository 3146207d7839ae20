#include "lowrank/gauges.hpp"

#include "lowrank/svd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lowrank {

GaugeSpec GaugeSpec::l2() {
  GaugeSpec g;
  g.kind = GaugeKind::L2;
  g.value = [](const Eigen::VectorXd& x) { return x.norm(); };
  g.dual = [](const Eigen::VectorXd& x) { return x.norm(); };  // self-dual
  return g;
}

ScalarConvexSpec ScalarConvexSpec::half_square() {
  ScalarConvexSpec k;
  k.kind = ScalarKind::HalfSquare;
  k.value = [](double t) { return 0.5 * t * t; };
  k.conjugate = [](double s) { return 0.5 * s * s; };
  return k;
}

ScalarConvexSpec ScalarConvexSpec::identity() {
  ScalarConvexSpec k;
  k.kind = ScalarKind::Identity;
  k.value = [](double t) { return t; };
  k.conjugate = [](double s) { return s <= 1.0 ? 0.0 : std::numeric_limits<double>::infinity(); };
  return k;
}

double gauge_eval(const GaugeSpec& g, const Eigen::MatrixXd& A) {
  return g.value(full_svd(A).sigma);
}

double truncated_dual_gauge_eval(const GaugeSpec& g, Eigen::Index r, const Eigen::MatrixXd& A) {
  const Eigen::VectorXd sigma = full_svd(A).sigma;
  if (r < 1 || r > sigma.size())
    throw std::invalid_argument("truncated_dual_gauge_eval: 1 <= r <= min(n, m) required");
  return g.dual(sigma.head(r));
}

// ||A||_{l2,r*} = max <A, X> over sqrt(sum of the r largest sigma_i(X)^2) <= 1.
// On sorted singular values the maximizer pools the trailing entries: with
// s~ = (sigma_1, ..., sigma_{r-1}, sum_{i>=r} sigma_i), the value is the norm
// of the projection of s~ onto the nonincreasing cone, i.e. of the candidate
// whose last s+1 entries are averaged, for the pool size s that restores
// sortedness. Candidates that stay sorted are all achievable, so the largest
// feasible one is exact.
double low_rank_inducing_norm_sigma(Eigen::Index r, const Eigen::VectorXd& sigma) {
  const Eigen::Index q = sigma.size();
  if (r < 1 || r > q)
    throw std::invalid_argument("low_rank_inducing_norm_sigma: 1 <= r <= min(n, m) required");
  const double tail = sigma.tail(q - r + 1).sum();  // pooled mass at position r
  const double slack = 1e-12 * std::max(1.0, sigma(0));
  double best = 0.0;
  bool found = false;
  for (Eigen::Index s = 0; s < r; ++s) {
    // pool entries r-s..r of s~ (1-based) to their average
    const double pooled = sigma.segment(r - 1 - s, s).sum() + tail;
    const double avg = pooled / static_cast<double>(s + 1);
    if (r - 1 - s > 0 && avg > sigma(r - 2 - s) + slack) continue;  // not sorted
    const double head = sigma.head(r - 1 - s).squaredNorm();
    const double value = std::sqrt(head + pooled * pooled / static_cast<double>(s + 1));
    if (!found || value > best) best = value;
    found = true;
  }
  return best;
}

double low_rank_inducing_norm_eval(const GaugeSpec& g, Eigen::Index r, const Eigen::MatrixXd& A) {
  if (g.kind != GaugeKind::L2)
    throw std::invalid_argument("low_rank_inducing_norm_eval: only the l2 gauge is enabled");
  return low_rank_inducing_norm_sigma(r, full_svd(A).sigma);
}

double monotone_conjugate_eval(const ScalarConvexSpec& k, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("monotone_conjugate_eval: s must be >= 0");
  return k.conjugate(s);
}

}  // namespace lowrank
