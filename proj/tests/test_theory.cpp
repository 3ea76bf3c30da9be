// SPDX-License-Identifier: Apache-2.0
//
// Reference values in this file are frozen from an independent
// high-precision evaluation (40-digit arithmetic) of the same closed forms,
// cross-checked against an integral representation of the covariance
// function and against brute-force series and Monte Carlo oracles below.

#include "urnlab/theory.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "urnlab/rng.hpp"

using namespace urnlab;
using namespace urnlab::theory;

namespace {

void check_rel(double got, double want, double tol) {
  CHECK(std::abs(got - want) <= tol * std::abs(want));
}

}  // namespace

TEST_CASE("parameter bundle derives the power-law normalizer") {
  check_rel(TheoryParams(0.3).C, 0.87156888841856503905, 1e-13);
  check_rel(TheoryParams(0.5).C, 0.60792710185402662866, 1e-13);
  check_rel(TheoryParams(0.7).C, 0.34003865950658769025, 1e-13);
  check_rel(TheoryParams(0.9).C, 0.10432700376934142995, 1e-13);
  CHECK_THROWS_AS(TheoryParams(0.0), std::domain_error);
  CHECK_THROWS_AS(TheoryParams(1.0), std::domain_error);
  CHECK_THROWS_AS(TheoryParams(0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(TheoryParams(0.5, 0.5, 0), std::domain_error);
}

TEST_CASE("alpha counts the urns above the probability threshold") {
  TheoryParams half(0.5);
  CHECK(alpha(half, 100.0) == 7);
  CHECK(alpha(half, 1e6) == 779);
  CHECK(alpha(TheoryParams(0.3), 1000.0) == 7);
  // Urn 1 qualifies as soon as x reaches 1/p_1.
  CHECK(alpha(half, 1.0 / half.C) >= 1);
  // Nondecreasing in x.
  std::uint64_t prev = 0;
  for (double x = 1.0; x < 1e6; x *= 1.7) {
    std::uint64_t a = alpha(half, x);
    CHECK(a >= prev);
    prev = a;
  }
  // Growth constant: alpha(x)/sqrt(x) approaches sqrt(C).
  check_rel(static_cast<double>(alpha(half, 1e10)) / 1e5,
            std::sqrt(half.C), 1e-4);
  CHECK_THROWS_AS(alpha(half, 0.5), std::domain_error);
}

TEST_CASE("occupancy limit pmf values and normalization") {
  check_rel(yule_simon_pmf(0.5, 1), 2.0 / 3.0, 1e-14);
  check_rel(yule_simon_pmf(0.5, 2), 1.0 / 6.0, 1e-14);
  check_rel(yule_simon_pmf(0.3, 3), 0.077482605945604048071, 1e-13);
  check_rel(yule_simon_pmf(0.7, 5), 0.0089436878910563121089, 1e-13);
  CHECK_THROWS_AS(yule_simon_pmf(0.5, 0), std::domain_error);
  CHECK_THROWS_AS(yule_simon_pmf(1.0, 1), std::domain_error);

  // Sums to one. The remainder past N is below Gamma(1+rho) N^{-rho}.
  for (double p : {0.3, 0.5, 0.7}) {
    const std::uint64_t N = p == 0.5 ? 1000000 : 100000;
    double sum = 0.0;
    for (std::uint64_t i = N; i >= 1; --i) sum += yule_simon_pmf(p, i);
    double rho = 1.0 / (1.0 - p);
    double tail = std::exp(std::lgamma(1.0 + rho) - rho * std::log(N));
    CAPTURE(p);
    CHECK(std::abs(sum - 1.0) <= tail + 1e-6);
  }
}

TEST_CASE("per-size fractions of the copy model") {
  check_rel(simon_limit_fraction(0.5, 1), 1.0 / 3.0, 1e-14);
  check_rel(simon_limit_fraction(0.5, 2), 1.0 / 12.0, 1e-14);
  check_rel(simon_limit_fraction(0.7, 3), 0.031882591093117408907, 1e-13);

  // Summing over all sizes recovers the innovation rate p.
  for (double p : {0.3, 0.5, 0.7}) {
    const std::uint64_t N = 100000;
    double sum = 0.0;
    for (std::uint64_t j = N; j >= 1; --j) sum += simon_limit_fraction(p, j);
    double rho = 1.0 / (1.0 - p);
    double tail =
        p * std::exp(std::lgamma(1.0 + rho) - rho * std::log(N));
    CAPTURE(p);
    CHECK(std::abs(sum - p) <= tail + 1e-8);
  }
}

TEST_CASE("distinct-count variance scale") {
  check_rel(karlin_variance(TheoryParams(0.5), 1e4),
            57.243344972633776928, 1e-12);
  check_rel(karlin_variance(TheoryParams(0.3), 1e3),
            2.2870050450893723122, 1e-12);
  check_rel(karlin_variance(TheoryParams(0.7), 1e5),
            2776.5442862664689345, 1e-12);
  // Pure power-law scaling in n.
  for (double theta : {0.3, 0.5, 0.9}) {
    TheoryParams params(theta);
    check_rel(karlin_variance(params, 4e5) / karlin_variance(params, 1e5),
              std::pow(4.0, theta), 1e-13);
  }
  // For the pure power law the asymptotic variance scale coincides with the
  // exact Poissonized variance to machine precision already at n = 10^4:
  // the boundary corrections of the defining series vanish to all orders.
  PoissonizedMoments pm = poissonized_moments(TheoryParams(0.5), 1e4, 1);
  check_rel(karlin_variance(TheoryParams(0.5), 1e4), pm.variance[0], 1e-6);
}

TEST_CASE("limiting covariances of the exact-size counts") {
  check_rel(karlin_covariance(0.5, 1, 1), 0.72956265828832048225, 1e-12);
  check_rel(karlin_covariance(0.5, 1, 2), -0.058749100186664074275, 1e-12);
  check_rel(karlin_covariance(0.5, 2, 2), 0.18483854374652445699, 1e-12);
  check_rel(karlin_covariance(0.5, 1, 3), -0.024478791744443364281, 1e-12);
  check_rel(karlin_covariance(0.3, 1, 1), 0.30551668731668240707, 1e-12);
  check_rel(karlin_covariance(0.7, 2, 3), -0.026223654716459634169, 1e-12);

  for (double theta : {0.3, 0.5, 0.7}) {
    // Symmetric, negative off the diagonal, positive on it.
    for (std::uint32_t i = 1; i <= 5; ++i) {
      for (std::uint32_t j = 1; j <= 5; ++j) {
        double cij = karlin_covariance(theta, i, j);
        CHECK(cij == karlin_covariance(theta, j, i));
        if (i == j) CHECK(cij > 0.0);
        else CHECK(cij < 0.0);
      }
    }
    // The 5x5 covariance matrix is positive semidefinite.
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        m(i, j) = karlin_covariance(theta, i + 1, j + 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("covariance function of the cumulative-count limit process") {
  check_rel(fclt_covariance(0.5, 1, 1, 1.0, 1.0),
            0.73417442372548447512, 1e-12);
  check_rel(fclt_covariance(0.5, 1, 2, 0.4, 0.9),
            0.10694837066717755197, 1e-12);
  check_rel(fclt_covariance(0.5, 2, 1, 0.3, 0.7),
            0.023644487340655198572, 1e-12);
  check_rel(fclt_covariance(0.5, 2, 2, 1.0, 1.0),
            0.21042294469830470616, 1e-12);
  check_rel(fclt_covariance(0.5, 1, 3, 0.25, 0.75),
            0.045108513139872306952, 1e-12);
  check_rel(fclt_covariance(0.3, 1, 2, 0.5, 1.0),
            0.069416816832734662566, 1e-12);
  check_rel(fclt_covariance(0.7, 2, 3, 0.6, 0.8),
            0.088845510949693152858, 1e-12);
  check_rel(fclt_covariance(0.5, 3, 2, 0.5, 0.5),
            0.051860421142017728596, 1e-12);

  SUBCASE("reduces to the variance coefficient at the corner") {
    for (double theta :
         {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
      double coeff =
          std::exp(std::lgamma(1.0 - theta)) * (std::pow(2.0, theta) - 1.0);
      CAPTURE(theta);
      CHECK(std::abs(fclt_covariance(theta, 1, 1, 1.0, 1.0) - coeff) <
            1e-10);
    }
  }
  SUBCASE("equal-time symmetry links the two branches") {
    // At tau == t the (i,j) and (j,i) values agree while being computed by
    // different formulas.
    for (double theta : {0.3, 0.5, 0.7}) {
      for (double t : {0.2, 0.5, 1.0}) {
        for (std::uint32_t i = 1; i <= 3; ++i) {
          for (std::uint32_t j = static_cast<std::uint32_t>(i + 1); j <= 4;
               ++j) {
            double a = fclt_covariance(theta, i, j, t, t);
            double b = fclt_covariance(theta, j, i, t, t);
            CAPTURE(theta);
            CAPTURE(t);
            CHECK(std::abs(a - b) < 1e-10);
          }
        }
      }
    }
  }
  SUBCASE("swapped arguments reuse the displayed half") {
    Rng rng(424242);
    for (int trial = 0; trial < 20; ++trial) {
      double tau = 0.05 + 0.95 * rng.u01();
      double t = 0.05 + 0.95 * rng.u01();
      std::uint32_t i = 1 + static_cast<std::uint32_t>(rng.below(3));
      std::uint32_t j = 1 + static_cast<std::uint32_t>(rng.below(3));
      double a = fclt_covariance(0.5, i, j, tau, t);
      double b = fclt_covariance(0.5, j, i, t, tau);
      CHECK(std::abs(a - b) < 1e-10);
    }
  }
  SUBCASE("continuity near the diagonal") {
    CHECK(std::abs(fclt_covariance(0.5, 1, 1, 0.999, 1.0) -
                   fclt_covariance(0.5, 1, 1, 1.0, 1.0)) < 1e-2);
  }
  SUBCASE("domain guards") {
    CHECK_THROWS_AS(fclt_covariance(0.5, 0, 1, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(fclt_covariance(0.5, 1, 1, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(fclt_covariance(0.5, 1, 1, 0.5, 1.5), std::domain_error);
  }
}

TEST_CASE("poisson-horizon moments match frozen references") {
  struct Golden {
    double theta, n;
    std::uint32_t k;
    double mean, variance;
  };
  const Golden goldens[] = {
      {0.5, 1e4, 1, 137.6976597885341917056, 57.24334497263377644878},
      {0.5, 1e4, 2, 68.5988298942670958574, 16.40660968874388405286},
      {0.5, 1e4, 3, 51.32412242070032187249, 9.442051923376735089773},
      {0.5, 1e3, 1, 43.20193722368485517924, 18.10193510002548020854},
      {0.7, 1e3, 1, 176.498191626520336908, 110.5362189722023023927},
      {0.7, 1e3, 2, 52.59945748795610813289, 18.0653091352277565859},
      {0.3, 1e3, 1, 9.394262657822406915975, 2.2870098532765808105},
      {0.3, 1e3, 3, 5.386885832885366538196, 0.6342400025310629808433},
      {0.9, 1e2, 1, 78.0050445066270336908, 67.99060616150644348169},
      {0.5, 1e5, 1, 436.5193722368316282887, 181.0193510002717350319},
  };
  for (const Golden& g : goldens) {
    CAPTURE(g.theta);
    CAPTURE(g.n);
    CAPTURE(g.k);
    PoissonizedMoments pm =
        poissonized_moments(TheoryParams(g.theta), g.n, g.k);
    check_rel(pm.mean[g.k - 1], g.mean, 1e-12);
    check_rel(pm.variance[g.k - 1], g.variance, 1e-12);
    // Certified truncation remainder is far below the reporting tolerance.
    CHECK(pm.tail_bound < 1e-9 * pm.mean[g.k - 1]);
    CHECK(pm.tail_bound < 1e-9 * pm.variance[g.k - 1]);
  }
}

TEST_CASE("poisson-horizon moments, structural checks") {
  SUBCASE("zero horizon") {
    PoissonizedMoments pm = poissonized_moments(TheoryParams(0.5), 0.0, 3);
    for (double v : pm.mean) CHECK(v == 0.0);
    for (double v : pm.variance) CHECK(v == 0.0);
  }
  SUBCASE("k = 1 mean equals the direct occupancy series") {
    TheoryParams params(0.5);
    const double n = 1000.0;
    const double A = n * params.C;
    double brute = 0.0;
    const std::uint64_t J = 10000000;
    for (std::uint64_t j = J; j >= 1; --j)
      brute += -std::expm1(-A / (static_cast<double>(j) * j));
    double cut = A / J;  // remaining terms are below sum lambda_j
    PoissonizedMoments pm = poissonized_moments(params, n, 1);
    CHECK(std::abs(pm.mean[0] - brute) <= cut + 1e-9 * pm.mean[0]);
  }
  SUBCASE("k = 1 mean is nondecreasing in n") {
    TheoryParams params(0.7);
    double prev = 0.0;
    for (double n : {10.0, 100.0, 1000.0, 10000.0}) {
      double m = poissonized_moments(params, n, 1).mean[0];
      CHECK(m >= prev);
      prev = m;
    }
  }
  SUBCASE("independent Bernoulli-urn Monte Carlo agrees") {
    // Occupancy indicators of independent Poisson counts are independent
    // Bernoulli draws; this oracle never touches the series code.
    TheoryParams params(0.5);
    const double n = 1000.0;
    const double A = n * params.C;
    const std::uint64_t J = 40000;
    std::vector<double> occupied(J);
    for (std::uint64_t j = 1; j <= J; ++j)
      occupied[j - 1] = -std::expm1(-A / (static_cast<double>(j) * j));
    double bias = A / J;  // expected occupied urns beyond the cutoff

    const int reps = 10000;
    Rng rng(550123);
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
      double count = 0.0;
      for (std::uint64_t j = 0; j < J; ++j)
        if (rng.u01() < occupied[j]) count += 1.0;
      sum += count;
      sumsq += count * count;
    }
    double mean = sum / reps;
    double var = (sumsq - sum * sum / reps) / (reps - 1);
    PoissonizedMoments pm = poissonized_moments(params, n, 1);
    double se = std::sqrt(var / reps);
    CHECK(std::abs(mean - pm.mean[0]) <= 4.0 * se + bias);
    CHECK(var / pm.variance[0] > 0.85);
    CHECK(var / pm.variance[0] < 1.15);
  }
}

TEST_CASE("finite embedding of the copy model") {
  SUBCASE("two-type worked example") {
    JansonEmbedding e = janson_embedding(2, 0.5);
    REQUIRE(e.A.size() == 2);
    CHECK(e.A[0][0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e.A[0][1] == doctest::Approx(0.5));
    CHECK(e.A[1][0] == doctest::Approx(1.0));
    CHECK(e.A[1][1] == doctest::Approx(0.5));
    CHECK(std::abs(e.lambda1 - 1.0) < 1e-10);
    CHECK(std::abs(e.lambda2 - (-0.5)) < 1e-10);
    CHECK(std::abs(e.lambda1_imag) < 1e-12);
    CHECK(std::abs(e.lambda2_imag) < 1e-12);
  }
  SUBCASE("top of the spectrum across sizes") {
    for (std::uint32_t m : {2u, 3u, 5u, 10u, 50u}) {
      for (double p : {0.3, 0.5, 0.7}) {
        JansonEmbedding e = janson_embedding(m, p);
        CAPTURE(m);
        CAPTURE(p);
        CHECK(std::abs(e.lambda1 - 1.0) < 1e-8);
        CHECK(std::abs(e.lambda2 - (p - 1.0)) < 1e-8);
        CHECK(e.spectral_gap_ok);
      }
    }
  }
  SUBCASE("each outcome adds exactly one ball") {
    for (std::uint32_t m : {2u, 3u, 7u}) {
      JansonEmbedding e = janson_embedding(m, 0.4);
      // Ball mass per type: i balls for small urns, 1 per aggregated ball.
      std::vector<double> mass(m);
      for (std::uint32_t i = 1; i < m; ++i) mass[i - 1] = i;
      mass[m - 1] = 1.0;
      for (const auto& outcomes : e.increments) {
        double total_prob = 0.0;
        for (const auto& o : outcomes) {
          total_prob += o.prob;
          double added = 0.0;
          for (std::uint32_t i = 0; i < m; ++i)
            added += mass[i] * o.delta[i];
          CHECK(added == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(total_prob == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("domain guards") {
    CHECK_THROWS_AS(janson_embedding(1, 0.5), std::domain_error);
    CHECK_THROWS_AS(janson_embedding(3, 0.0), std::domain_error);
  }
}
