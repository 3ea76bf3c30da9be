// SPDX-License-Identifier: Apache-2.0
//
// Closed-form limit quantities for the urn models, plus exact moments of the
// Poissonized occupancy counts. Everything here is a pure function; the
// Poissonized series carry certified truncation bounds so they can serve as
// oracles for the simulators.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace urnlab::theory {

// Shared parameter bundle. C is derived from theta: the power law
// p_j = C j^{-1/theta} normalizes with C = 1/zeta(1/theta). The slowly
// varying factor L(x) of the general theory is the constant C^theta here.
struct TheoryParams {
  double theta;
  double p;
  double C;
  std::uint32_t kmax;

  explicit TheoryParams(double theta, double p = 0.5, std::uint32_t kmax = 10);
};

// Number of urns with individual probability at least 1/x, i.e.
// floor((C x)^theta). Nondecreasing in x; the variance scale of the
// occupancy CLTs.
std::uint64_t alpha(const TheoryParams& params, double x);

// Limit law of a uniformly chosen urn's occupancy in the copy model:
// f(i) = rho * B(i, 1 + rho) with rho = 1/(1-p).
double yule_simon_pmf(double p, std::uint64_t i);

// Almost-sure limit of R_{n,j}/n in the copy model:
// (p/(1-p)) * B(j, (2-p)/(1-p)). Sums to p over j >= 1.
double simon_limit_fraction(double p, std::uint64_t j);

// Variance scale of the distinct-urn count: Gamma(1-theta) (2^theta - 1)
// C^theta n^theta.
double karlin_variance(const TheoryParams& params, double n);

// Limiting covariance of the exactly-r occupancy counts scaled by alpha(n).
// Off-diagonal entries are strictly negative.
double karlin_covariance(double theta, std::uint32_t r_i, std::uint32_t r_j);

// Covariance function c*_{ij}(tau, t) of the limiting Gaussian process for
// the cumulative counts, 0 < tau, t <= 1. Evaluates the displayed sums for
// tau <= t and uses the symmetry c*_{ij}(tau,t) = c*_{ji}(t,tau) otherwise.
double fclt_covariance(double theta, std::uint32_t i, std::uint32_t j,
                       double tau, double t);

// Exact first and second moments of the cumulative counts under a Poisson
// horizon with mean n: mean[k-1] = sum_j P(Pois(n p_j) >= k) and
// variance[k-1] = sum_j P(1 - P). tail_bound is a certified absolute bound
// on the truncation error of every reported entry.
struct PoissonizedMoments {
  std::vector<double> mean;
  std::vector<double> variance;
  double tail_bound = 0.0;
};
PoissonizedMoments poissonized_moments(const TheoryParams& params, double n,
                                       std::uint32_t kmax);

// Finite urn embedding of the copy model: types 1..m-1 are urns with that
// many balls (activity a_i = i), type m aggregates the rest (activity 1).
// A[i][j] = a_j * E[xi_j]_i, and the spectrum decides the CLT regime.
struct JansonEmbedding {
  struct Outcome {
    double prob;
    std::vector<double> delta;
  };

  std::uint32_t m = 0;
  double p = 0.0;
  std::vector<double> weights;
  std::vector<std::vector<Outcome>> increments;  // increments[j-1]: type j
  std::vector<std::vector<double>> A;            // row-major m x m
  std::vector<std::complex<double>> spectrum;    // sorted by real part, desc
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda1_imag = 0.0;
  double lambda2_imag = 0.0;
  bool spectral_gap_ok = false;  // Re lambda2 < Re lambda1 / 2
};
JansonEmbedding janson_embedding(std::uint32_t m, double p);

}  // namespace urnlab::theory
