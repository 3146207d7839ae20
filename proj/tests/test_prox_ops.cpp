#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "lowrank/gauges.hpp"
#include "lowrank/prox.hpp"
#include "lowrank/svd.hpp"
#include "support/oracles.hpp"

using namespace lowrank;
namespace orc = lowrank::oracles;

namespace {

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

// random nonincreasing nonnegative vector, occasionally with ties and zeros
Eigen::VectorXd random_sigma(Eigen::Index q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  Eigen::VectorXd w(q);
  for (Eigen::Index i = 0; i < q; ++i) w(i) = unif(rng);
  if (unif(rng) < 0.5 && q >= 2) w(1) = w(0);  // tie at the top
  if (unif(rng) < 0.5) w(q - 1) = 0.0;
  std::sort(w.data(), w.data() + q, std::greater<double>());
  return w;
}

}  // namespace

TEST_CASE("prox of the scaled gauge") {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd P = orc::random_gaussian(4, 3, rng);

  const auto hs = ObjectiveSpec::half_square_l2(1, 0.5);
  CHECK((prox_scaled_gauge(hs, P) - P / 1.5).norm() <= 1e-14);

  const auto id = ObjectiveSpec::identity_l2(1, 0.5);
  const double n = P.norm();
  CHECK((prox_scaled_gauge(id, P) - (1.0 - 0.5 / n) * P).norm() <= 1e-13);
  CHECK(prox_scaled_gauge(ObjectiveSpec::identity_l2(1, n + 1.0), P).norm() == 0.0);

  CHECK_THROWS_AS((void)prox_scaled_gauge(ObjectiveSpec::half_square_l2(1, -1.0), P),
                  std::invalid_argument);
}

TEST_CASE("non-convex prox closed form") {
  const auto spec = ObjectiveSpec::half_square_l2(1, 1.0);
  const RankTruncation t = prox_nonconvex_rank(spec, diag2(2.0, 1.0));
  CHECK((t.matrix - diag2(1.0, 0.0)).norm() <= 1e-14);
  CHECK_FALSE(t.tie);
  CHECK(prox_nonconvex_rank(spec, diag2(1.0, 1.0)).tie);
}

TEST_CASE("non-convex prox minimizes its objective over rank-r candidates") {
  std::mt19937_64 rng(32);
  for (Eigen::Index r : {1, 2}) {
    for (double gamma : {0.5, 1.0, 2.0}) {
      const auto spec = ObjectiveSpec::half_square_l2(r, gamma);
      const Eigen::MatrixXd Z = orc::random_gaussian(5, 4, rng);
      const Eigen::MatrixXd M = prox_nonconvex_rank(spec, Z).matrix;
      const auto objective = [&](const Eigen::MatrixXd& C) {
        return 0.5 * C.squaredNorm() + (C - Z).squaredNorm() / (2.0 * gamma);
      };
      const double best = objective(M);
      for (int k = 0; k < 3000; ++k) {
        Eigen::MatrixXd C = orc::random_rank_matrix(5, 4, r, rng) * (0.2 + 0.6 * (k % 5));
        CHECK(best <= objective(C) + 1e-9);
        C = svd_r(M + 0.05 * orc::random_gaussian(5, 4, rng), r).matrix;
        CHECK(best <= objective(C) + 1e-9);
      }
    }
  }
}

TEST_CASE("conjugate prox on singular values matches the reference") {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index q = 6;
    const Eigen::VectorXd w = random_sigma(q, rng);
    for (Eigen::Index r : {1, 2, 4, 6}) {
      for (double c : {0.1, 1.0, 10.0}) {
        const Eigen::VectorXd y = conjugate_prox_sigma(w, r, c);
        // feasible for the cone
        for (Eigen::Index i = 0; i + 1 < q; ++i) CHECK(y(i) >= y(i + 1) - 1e-12);
        CHECK(y(q - 1) >= -1e-12);
        // first-order optimal and no worse than the iterative reference
        CHECK(orc::conjugate_prox_kkt(w, r, c, y) <= 1e-9);
        const auto ref = orc::conjugate_prox_reference(w, r, c);
        CHECK(orc::conjugate_prox_objective(w, r, c, y) <= ref.objective + 1e-9);
      }
    }
  }
}

TEST_CASE("moreau identity of the envelope pair") {
  std::mt19937_64 rng(34);
  for (double gamma : {0.1, 1.0, 10.0}) {
    for (Eigen::Index r : {1, 2, 3}) {
      const auto spec = ObjectiveSpec::half_square_l2(r, gamma);
      for (int k = 0; k < 10; ++k) {
        const Eigen::MatrixXd Z = orc::random_gaussian(5, 4, rng) * 3.0;
        CHECK(moreau_check(spec, Z) <= 1e-12 * std::max(1.0, Z.norm()));
      }
    }
  }
}

TEST_CASE("envelope prox boundary fixture") {
  const auto spec = ObjectiveSpec::half_square_l2(1, 1.0);
  const Eigen::MatrixXd Z = diag2(2.0, 1.0);
  CHECK((prox_envelope(spec, Z) - diag2(1.0, 0.0)).norm() <= 1e-12);

  const ProxEquivalenceReport rep = prox_equivalence_conditions(spec, Z);
  CHECK(rep.cond_i);
  CHECK(rep.cond_ii);
  CHECK(rep.cond_iii);
  CHECK(rep.cond_iv);
  CHECK(rep.all());
  CHECK(rep.gap == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("envelope prox strict-violation fixture") {
  const auto spec = ObjectiveSpec::half_square_l2(1, 0.5);
  const Eigen::MatrixXd Z = diag2(2.0, 1.0);
  CHECK((prox_envelope(spec, Z) - diag2(1.25, 0.25)).norm() <= 1e-12);

  const ProxEquivalenceReport rep = prox_equivalence_conditions(spec, Z);
  CHECK_FALSE(rep.cond_i);
  CHECK_FALSE(rep.cond_ii);
  CHECK_FALSE(rep.cond_iii);
  CHECK_FALSE(rep.cond_iv);
  CHECK(rep.gap == doctest::Approx(-0.25));
  CHECK(rep.agree());  // |gap| > 1e-6 and conditions match the inequality
}

TEST_CASE("envelope prox equals non-convex prox on rank-r inputs") {
  std::mt19937_64 rng(35);
  for (Eigen::Index r : {1, 2, 3}) {
    for (double gamma : {0.1, 1.0, 10.0}) {
      const auto spec = ObjectiveSpec::half_square_l2(r, gamma);
      for (int k = 0; k < 10; ++k) {
        const Eigen::MatrixXd Z = orc::random_rank_matrix(6, 5, r, rng);
        const Eigen::MatrixXd Mc = prox_envelope(spec, Z);
        const Eigen::MatrixXd Mn = prox_nonconvex_rank(spec, Z).matrix;
        CHECK((Mc - Mn).norm() <= 1e-8 * std::max(1.0, Z.norm()));
        CHECK((Mn - Z / (1.0 + gamma)).norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("envelope prox is firmly nonexpansive") {
  std::mt19937_64 rng(36);
  const auto spec = ObjectiveSpec::half_square_l2(2, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Eigen::MatrixXd Z1 = orc::random_gaussian(5, 4, rng);
    const Eigen::MatrixXd Z2 = orc::random_gaussian(5, 4, rng);
    const Eigen::MatrixXd P1 = prox_envelope(spec, Z1);
    const Eigen::MatrixXd P2 = prox_envelope(spec, Z2);
    CHECK((P1 - P2).squaredNorm() <= inner(P1 - P2, Z1 - Z2) + 1e-10);
  }
}

TEST_CASE("envelope value and conjugate value agree at prox points") {
  // at Y = prox(Z), D = (Z - Y)/gamma attains equality in Fenchel-Young for
  // the pair (half of the norm squared, half of the truncated dual squared)
  std::mt19937_64 rng(37);
  const GaugeSpec g = GaugeSpec::l2();
  for (Eigen::Index r : {1, 2, 3}) {
    for (double gamma : {0.5, 1.0}) {
      const auto spec = ObjectiveSpec::half_square_l2(r, gamma);
      for (int k = 0; k < 20; ++k) {
        const Eigen::MatrixXd Z = orc::random_gaussian(5, 4, rng) * 2.0;
        const Eigen::MatrixXd Y = prox_envelope(spec, Z);
        const Eigen::MatrixXd D = (Z - Y) / gamma;
        const double primal = low_rank_inducing_norm_eval(g, r, Y);
        const double dual = truncated_dual_gauge_eval(g, r, D);
        CHECK(0.5 * primal * primal + 0.5 * dual * dual ==
              doctest::Approx(inner(Y, D)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("identity scalar term rejects the envelope machinery") {
  const auto id = ObjectiveSpec::identity_l2(1, 1.0);
  const Eigen::MatrixXd Z = diag2(2.0, 1.0);
  CHECK_THROWS_AS((void)prox_envelope(id, Z), std::invalid_argument);
  CHECK_THROWS_AS((void)prox_conjugate(id, Z), std::invalid_argument);
  CHECK_THROWS_AS((void)prox_equivalence_conditions(id, Z), std::invalid_argument);
}

TEST_CASE("conjugate prox input validation") {
  Eigen::VectorXd w(3);
  w << 2.0, 1.0, 0.5;
  CHECK_THROWS_AS((void)conjugate_prox_sigma(w, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)conjugate_prox_sigma(w, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)conjugate_prox_sigma(w, 1, 0.0), std::invalid_argument);
}
