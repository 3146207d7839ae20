#include "lowrank/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "lowrank/svd.hpp"

namespace lowrank {

DualCertificate dual_from_primal(const Eigen::MatrixXd& Z_star, const Eigen::MatrixXd& M_star,
                                 double gamma, Eigen::Index r, double tau_tie) {
  if (!(gamma > 0.0)) throw std::invalid_argument("dual_from_primal: gamma must be > 0");
  if (Z_star.rows() != M_star.rows() || Z_star.cols() != M_star.cols())
    throw std::invalid_argument("dual_from_primal: Z* and M* shapes differ");
  const Eigen::Index q = std::min(Z_star.rows(), Z_star.cols());
  if (r < 1 || r > q) throw std::invalid_argument("dual_from_primal: 1 <= r <= q required");

  DualCertificate cert;
  cert.D_star = (Z_star - M_star) / gamma;
  cert.r = r;
  cert.gamma = gamma;

  const SvdFactorization f = full_svd(cert.D_star, tau_tie);
  cert.tie_tol = f.tie_tol;
  cert.sigma_r = f.sigma(r - 1);
  cert.sigma_r_plus_1 = r < q ? f.sigma(r) : 0.0;
  cert.epsilon = gamma * (cert.sigma_r - cert.sigma_r_plus_1);

  if (cert.sigma_r <= cert.tie_tol) {
    cert.tie_multiplicity = 0;  // vanishing sigma_r certifies on its own
    cert.low_rank_guarantee = true;
  } else {
    Eigen::Index s = 0;
    while (r - 1 + s + 1 < q && cert.sigma_r - f.sigma(r + s) <= cert.tie_tol) ++s;
    cert.tie_multiplicity = s;
    cert.low_rank_guarantee = cert.sigma_r - cert.sigma_r_plus_1 > cert.tie_tol;
  }
  return cert;
}

bool rank_bound_check(const Eigen::MatrixXd& M_star, const DualCertificate& cert,
                      double rank_rel_tol) {
  return numerical_rank(M_star, rank_rel_tol) <= cert.r + cert.tie_multiplicity;
}

double LimitPointReport::max_residual() const {
  return std::max({orth_left, orth_right, subgrad_residual});
}

bool LimitPointReport::pass(double tol) const { return max_residual() <= tol && sigma_bound_ok; }

LimitPointReport dr_limit_point_check(const Eigen::MatrixXd& X_star, const Eigen::MatrixXd& Z_star,
                                      double gamma, Eigen::Index r, LimitPointMode mode,
                                      const SubgradientTest& subgrad, double bound_tol,
                                      double rank_rel_tol) {
  if (!(gamma > 0.0)) throw std::invalid_argument("dr_limit_point_check: gamma must be > 0");
  if (X_star.rows() != Z_star.rows() || X_star.cols() != Z_star.cols())
    throw std::invalid_argument("dr_limit_point_check: X* and Z* shapes differ");
  const Eigen::Index q = std::min(X_star.rows(), X_star.cols());
  if (r < 1 || r > q) throw std::invalid_argument("dr_limit_point_check: 1 <= r <= q required");
  if (!subgrad) throw std::invalid_argument("dr_limit_point_check: subgradient test required");
  const Eigen::Index rank_x = numerical_rank(X_star, rank_rel_tol);
  if (rank_x > r)
    throw std::invalid_argument("dr_limit_point_check: numerical rank of X* is " +
                                std::to_string(rank_x) + ", above the candidate bound " +
                                std::to_string(r) +
                                "; the fixed-point conditions only cover rank <= r");

  LimitPointReport rep;
  rep.mode = mode;
  rep.R = (Z_star - (1.0 + gamma) * X_star) / gamma;
  rep.orth_left = (rep.R.transpose() * X_star).norm();
  rep.orth_right = (X_star * rep.R.transpose()).norm();
  rep.subgrad_residual = subgrad(X_star, -X_star - rep.R);

  const Eigen::VectorXd sig_x = full_svd(X_star).sigma;
  rep.sigma1_R = full_svd(rep.R).sigma(0);
  rep.sigma_r_X = sig_x(r - 1);
  const double factor = mode == LimitPointMode::Convex ? 1.0 : 1.0 + 1.0 / gamma;
  rep.sigma_bound = factor * rep.sigma_r_X;
  rep.sigma_bound_ok = rep.sigma1_R <= rep.sigma_bound + bound_tol * std::max(1.0, sig_x(0));
  return rep;
}

AttractionReport attraction_ball_test(const ProxFn& prox_convex, const ProxFn& prox_nonconvex,
                                      const ProxFn& prox_f2, const DualCertificate& cert,
                                      const Eigen::MatrixXd& Z_star, const AttractionConfig& cfg) {
  cfg.solver.validate();
  if (cfg.trials < 0) throw std::invalid_argument("attraction_ball_test: trials must be >= 0");
  AttractionReport report;
  report.epsilon = cert.epsilon;
  if (cfg.trials == 0) return report;
  if (!(cert.epsilon > 0.0))
    throw std::invalid_argument("attraction_ball_test: certificate epsilon must be > 0");

  const double radius = cfg.radius_scale * cert.epsilon;
  const double dim = static_cast<double>(Z_star.size());
  const Eigen::MatrixXd X_ref = Z_star - cert.gamma * cert.D_star;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Eigen::MatrixXd D(Z_star.rows(), Z_star.cols());
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      for (Eigen::Index i = 0; i < D.rows(); ++i) D(i, j) = gauss(rng);
    const double scale = radius * std::pow(unif(rng), 1.0 / dim) / std::max(D.norm(), 1e-300);

    AttractionTrial t;
    t.initial_distance = scale * D.norm();
    Eigen::MatrixXd Zc = Z_star + scale * D;
    Eigen::MatrixXd Zn = Zc;
    t.iterates_coincide = true;

    for (long k = 1; k <= cfg.solver.max_iter; ++k) {
      const Eigen::MatrixXd Xc = prox_convex(Zc);
      const Eigen::MatrixXd Xn = prox_nonconvex(Zn);
      if ((Xc - Xn).norm() > cfg.eq_tol * std::max(1.0, Xc.norm())) t.iterates_coincide = false;
      const Eigen::MatrixXd Yc = prox_f2(2.0 * Xc - Zc);
      const Eigen::MatrixXd Yn = prox_f2(2.0 * Xn - Zn);
      const double res_c = (Yc - Xc).norm();
      const double res_n = (Yn - Xn).norm();
      Zc += cfg.solver.rho * (Yc - Xc);
      Zn += cfg.solver.rho * (Yn - Xn);
      t.iterations = k;
      if (res_c <= cfg.solver.tol_fixed_point && res_n <= cfg.solver.tol_fixed_point) {
        t.status = SolveStatus::Converged;
        break;
      }
    }
    if ((Zc - Zn).norm() > cfg.eq_tol * std::max(1.0, Zc.norm())) t.iterates_coincide = false;

    t.final_distance = (Zn - Z_star).norm();
    t.final_x_distance = (prox_nonconvex(Zn) - X_ref).norm();
    t.reached_reference = t.final_distance <= cfg.z_tol * std::max(1.0, Z_star.norm());
    if (t.reached_reference && t.iterates_coincide) ++report.passed;
    report.trials.push_back(std::move(t));
  }
  report.pass = report.passed == cfg.trials;
  return report;
}

}  // namespace lowrank
