#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <random>

#include "lowrank/gauges.hpp"
#include "lowrank/svd.hpp"
#include "support/oracles.hpp"

using namespace lowrank;
namespace orc = lowrank::oracles;

TEST_CASE("l2 gauge is the frobenius norm") {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd A = orc::random_gaussian(5, 4, rng);
  CHECK(gauge_eval(GaugeSpec::l2(), A) == doctest::Approx(A.norm()).epsilon(1e-12));
}

TEST_CASE("monotone conjugates") {
  const auto hs = ScalarConvexSpec::half_square();
  CHECK(hs.value(3.0) == doctest::Approx(4.5));
  CHECK(monotone_conjugate_eval(hs, 3.0) == doctest::Approx(4.5));

  const auto id = ScalarConvexSpec::identity();
  CHECK(id.value(3.0) == doctest::Approx(3.0));
  CHECK(monotone_conjugate_eval(id, 0.5) == 0.0);
  CHECK(monotone_conjugate_eval(id, 1.0) == 0.0);
  CHECK(monotone_conjugate_eval(id, 1.0 + 1e-12) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS((void)monotone_conjugate_eval(hs, -1.0), std::invalid_argument);
}

TEST_CASE("truncated dual gauge takes the top-r values") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D.diagonal() << 3.0, 2.0, 1.0;
  CHECK(truncated_dual_gauge_eval(GaugeSpec::l2(), 1, D) == doctest::Approx(3.0));
  CHECK(truncated_dual_gauge_eval(GaugeSpec::l2(), 2, D) ==
        doctest::Approx(std::sqrt(13.0)));
  CHECK(truncated_dual_gauge_eval(GaugeSpec::l2(), 3, D) ==
        doctest::Approx(std::sqrt(14.0)));
  CHECK_THROWS_AS((void)truncated_dual_gauge_eval(GaugeSpec::l2(), 4, D),
                  std::invalid_argument);
}

TEST_CASE("low rank inducing norm fixtures") {
  const GaugeSpec g = GaugeSpec::l2();
  CHECK(low_rank_inducing_norm_eval(g, 1, Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D.diagonal() << 1.0, 1.0, 0.0;
  CHECK(low_rank_inducing_norm_eval(g, 2, D) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("low rank inducing norm endpoints") {
  std::mt19937_64 rng(22);
  const GaugeSpec g = GaugeSpec::l2();
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd A = orc::random_gaussian(5, 4, rng);
    const Eigen::VectorXd sigma = full_svd(A).sigma;
    // r = 1: nuclear norm, checked against the sum and a projected-ascent oracle
    CHECK(low_rank_inducing_norm_eval(g, 1, A) ==
          doctest::Approx(sigma.sum()).epsilon(1e-10));
    CHECK(low_rank_inducing_norm_eval(g, 1, A) ==
          doctest::Approx(orc::nuclear_norm_reference(A)).epsilon(1e-6));
    // r = q: plain frobenius
    CHECK(low_rank_inducing_norm_eval(g, 4, A) == doctest::Approx(A.norm()).epsilon(1e-12));
  }
}

TEST_CASE("low rank inducing norm chain decreases in r and hits frobenius") {
  std::mt19937_64 rng(23);
  const GaugeSpec g = GaugeSpec::l2();
  for (int k = 0; k < 100; ++k) {
    const Eigen::MatrixXd A = orc::random_gaussian(5, 4, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 1; r <= 4; ++r) {
      const double v = low_rank_inducing_norm_eval(g, r, A);
      CHECK(v <= prev + 1e-8);
      CHECK(v >= A.norm() - 1e-10);
      prev = v;
    }
    CHECK(prev == doctest::Approx(A.norm()).epsilon(1e-12));
  }
}

TEST_CASE("low rank inducing norm equals the gauge on rank-r inputs") {
  std::mt19937_64 rng(24);
  const GaugeSpec g = GaugeSpec::l2();
  for (Eigen::Index r : {1, 2, 3}) {
    for (int k = 0; k < 20; ++k) {
      const Eigen::MatrixXd A = orc::random_rank_matrix(6, 5, r, rng);
      CHECK(low_rank_inducing_norm_eval(g, r, A) ==
            doctest::Approx(A.norm()).epsilon(1e-10));
    }
  }
}

TEST_CASE("low rank inducing norm is a norm") {
  std::mt19937_64 rng(25);
  const GaugeSpec g = GaugeSpec::l2();
  for (Eigen::Index r : {1, 2, 3}) {
    for (int k = 0; k < 30; ++k) {
      const Eigen::MatrixXd A = orc::random_gaussian(4, 4, rng);
      const Eigen::MatrixXd B = orc::random_gaussian(4, 4, rng);
      const double na = low_rank_inducing_norm_eval(g, r, A);
      const double nb = low_rank_inducing_norm_eval(g, r, B);
      CHECK(low_rank_inducing_norm_eval(g, r, A + B) <= na + nb + 1e-9);
      CHECK(low_rank_inducing_norm_eval(g, r, 2.5 * A) == doctest::Approx(2.5 * na));
      // unitary invariance
      const Eigen::MatrixXd U = orc::random_orthogonal(4, rng);
      const Eigen::MatrixXd V = orc::random_orthogonal(4, rng);
      CHECK(low_rank_inducing_norm_eval(g, r, U * A * V.transpose()) ==
            doctest::Approx(na).epsilon(1e-10));
    }
  }
}

TEST_CASE("duality between the norm and the truncated dual gauge") {
  std::mt19937_64 rng(26);
  const GaugeSpec g = GaugeSpec::l2();
  for (Eigen::Index r : {1, 2, 3}) {
    for (int k = 0; k < 50; ++k) {
      Eigen::MatrixXd A = orc::random_gaussian(5, 4, rng);
      A /= truncated_dual_gauge_eval(g, r, A);  // now ||A||_{dual,r} = 1
      const Eigen::MatrixXd B = orc::random_gaussian(5, 4, rng);
      CHECK(inner(A, B) <= low_rank_inducing_norm_eval(g, r, B) + 1e-8);
    }
  }
}

TEST_CASE("norm evaluation on raw singular value vectors") {
  Eigen::VectorXd sigma(3);
  sigma << 1.0, 1.0, 0.0;
  CHECK(low_rank_inducing_norm_sigma(2, sigma) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS((void)low_rank_inducing_norm_sigma(0, sigma), std::invalid_argument);
}
