// SPDX-License-Identifier: Apache-2.0

#include "urnlab/theory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "urnlab/math.hpp"

namespace urnlab::theory {
namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    std::string msg(name);
    msg += " must lie in (0,1)";
    throw std::domain_error(msg);
  }
}

double ipow(double base, std::uint32_t e) {
  double out = 1.0;
  for (std::uint32_t i = 0; i < e; ++i) out *= base;
  return out;
}

// K_{k} = theta * Gamma(k - theta) for k > 0, -Gamma(1 - theta) for k = 0.
double fclt_k(double theta, std::uint32_t k) {
  if (k == 0) return -pmath::exp(pmath::lgamma(1.0 - theta));
  return theta * pmath::exp(pmath::lgamma(static_cast<double>(k) - theta));
}

double beta_fn(double a, double b) {
  return pmath::exp(pmath::lgamma(a) + pmath::lgamma(b) - pmath::lgamma(a + b));
}

}  // namespace

TheoryParams::TheoryParams(double theta_, double p_, std::uint32_t kmax_)
    : theta(theta_), p(p_), C(0.0), kmax(kmax_) {
  check_unit(theta, "theta");
  check_unit(p, "p");
  if (kmax == 0) throw std::domain_error("kmax must be >= 1");
  C = 1.0 / pmath::zeta_em(1.0 / theta).value;
}

std::uint64_t alpha(const TheoryParams& params, double x) {
  if (!(x >= 1.0)) throw std::domain_error("alpha requires x >= 1");
  return static_cast<std::uint64_t>(pmath::pow(params.C * x, params.theta));
}

double yule_simon_pmf(double p, std::uint64_t i) {
  check_unit(p, "p");
  if (i == 0) throw std::domain_error("i must be >= 1");
  double rho = 1.0 / (1.0 - p);
  return rho * beta_fn(static_cast<double>(i), 1.0 + rho);
}

double simon_limit_fraction(double p, std::uint64_t j) {
  check_unit(p, "p");
  if (j == 0) throw std::domain_error("j must be >= 1");
  return p / (1.0 - p) *
         beta_fn(static_cast<double>(j), (2.0 - p) / (1.0 - p));
}

double karlin_variance(const TheoryParams& params, double n) {
  if (!(n >= 1.0)) throw std::domain_error("karlin_variance requires n >= 1");
  double theta = params.theta;
  return pmath::exp(pmath::lgamma(1.0 - theta)) *
         (pmath::pow(2.0, theta) - 1.0) * pmath::pow(params.C, theta) *
         pmath::pow(n, theta);
}

double karlin_covariance(double theta, std::uint32_t r_i, std::uint32_t r_j) {
  check_unit(theta, "theta");
  if (r_i == 0 || r_j == 0) throw std::domain_error("r must be >= 1");
  double ri = static_cast<double>(r_i);
  double rj = static_cast<double>(r_j);
  if (r_i != r_j) {
    double ln = pmath::lgamma(ri + rj - theta) - pmath::lgamma(ri + 1.0) -
                pmath::lgamma(rj + 1.0) + (theta - ri - rj) * kLn2;
    return -theta * pmath::exp(ln);
  }
  double inner = pmath::exp(pmath::lgamma(ri - theta)) -
                 pmath::pow(2.0, theta - 2.0 * ri) *
                     pmath::exp(pmath::lgamma(2.0 * ri - theta) -
                                pmath::lgamma(ri + 1.0));
  return theta / pmath::exp(pmath::lgamma(ri + 1.0)) * inner;
}

double fclt_covariance(double theta, std::uint32_t i, std::uint32_t j,
                       double tau, double t) {
  check_unit(theta, "theta");
  if (i == 0 || j == 0) throw std::domain_error("indices must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0 && t > 0.0 && t <= 1.0))
    throw std::domain_error("tau and t must lie in (0,1]");
  // The displayed sums assume tau <= t; the other half of the square comes
  // from the symmetry c*_{ij}(tau,t) = c*_{ji}(t,tau).
  if (tau > t) return fclt_covariance(theta, j, i, t, tau);

  // Common second sum over both branches.
  double second = 0.0;
  double s_fact = 1.0;
  for (std::uint32_t s = 0; s < i; ++s) {
    if (s > 0) s_fact *= s;
    double m_fact = 1.0;
    for (std::uint32_t m = 0; m < j; ++m) {
      if (m > 0) m_fact *= m;
      double num = ipow(tau, s) * ipow(t, m) * fclt_k(theta, m + s);
      double den =
          pmath::pow(t + tau, static_cast<double>(m + s) - theta) * s_fact *
          m_fact;
      second += num / den;
    }
  }

  if (i < j) {
    // 0^0 = 1 by convention: at tau == t the m = 0 terms survive.
    double first = 0.0;
    double s_fact2 = 1.0;
    for (std::uint32_t s = 0; s < i; ++s) {
      if (s > 0) s_fact2 *= s;
      double m_fact = 1.0;
      for (std::uint32_t m = 0; m + s < j; ++m) {
        if (m > 0) m_fact *= m;
        double tm = m == 0 ? 1.0 : ipow(t - tau, m);
        double num = ipow(tau, s) * tm * fclt_k(theta, m + s);
        double den = pmath::pow(t, static_cast<double>(m + s) - theta) *
                     s_fact2 * m_fact;
        first += num / den;
      }
    }
    return first - second;
  }

  double head = 0.0;
  double m_fact = 1.0;
  for (std::uint32_t m = 0; m < j; ++m) {
    if (m > 0) m_fact *= m;
    head += fclt_k(theta, m) / m_fact;
  }
  return pmath::pow(t, theta) * head - second;
}

PoissonizedMoments poissonized_moments(const TheoryParams& params, double n,
                                       std::uint32_t kmax) {
  if (!(n >= 0.0)) throw std::domain_error("n must be >= 0");
  if (kmax == 0) throw std::domain_error("kmax must be >= 1");
  PoissonizedMoments out;
  out.mean.assign(kmax, 0.0);
  out.variance.assign(kmax, 0.0);
  if (n == 0.0) return out;

  const double theta = params.theta;
  const double s = 1.0 / theta;
  const double A = n * params.C;  // lambda_j = A j^{-s}
  const double ln_a = pmath::log(A);

  // Head: every urn with lambda_j above 1/2, summed by the direct cdf.
  // J = ceil((2A)^theta) guarantees lambda_j <= 1/2 for all j > J.
  const std::uint64_t head_j =
      static_cast<std::uint64_t>(pmath::pow(2.0 * A, theta)) + 1;
  std::vector<double> q(kmax);
  for (std::uint64_t j = 1; j <= head_j; ++j) {
    double lambda =
        j == 1 ? A : A * pmath::exp(-s * pmath::log(static_cast<double>(j)));
    // pmf(0) underflows exactly to 0 for lambda beyond ~745; the cumulative
    // tail probabilities are then 1 to double precision, as they should be.
    double pmf = pmath::exp(-lambda);
    double tail = 1.0 - pmf;
    q[0] = tail;
    for (std::uint32_t k = 2; k <= kmax; ++k) {
      pmf *= lambda / (k - 1);
      tail -= pmf;
      q[k - 1] = tail;
    }
    for (std::uint32_t k = 0; k < kmax; ++k) {
      out.mean[k] += q[k];
      out.variance[k] += q[k] * (1.0 - q[k]);
    }
  }

  // Tail: for lambda <= 1/2 expand P(Pois(lambda) >= k) = sum_r d_r lambda^r
  // with d_k = 1/k! and |d| decreasing fast, then swap the sums so each
  // power of lambda aggregates to a Hurwitz zeta over the tail urns.
  // Sixty terms leave a remainder below (1/2)^60 relative.
  const std::uint32_t extra = 60;
  const std::uint32_t rmax = 2 * kmax + 2 * extra + 2;
  std::vector<double> zeta_ln(rmax + 1, -std::numeric_limits<double>::infinity());
  std::vector<double> zeta_rel(rmax + 1, 0.0);
  for (std::uint32_t r = 1; r <= rmax; ++r) {
    pmath::SeriesValue z =
        pmath::hurwitz_zeta_em(r * s, static_cast<double>(head_j + 1));
    if (z.value > 0.0) {
      zeta_ln[r] = pmath::log(z.value);
      zeta_rel[r] = z.tail_bound / z.value;
    }
  }
  // Aggregated term r of a coefficient series c: c_r * A^r * zeta(rs, J+1),
  // evaluated in log space because A^r alone can overflow.
  auto agg = [&](double coeff, std::uint32_t r) {
    if (coeff == 0.0 || zeta_ln[r] == -std::numeric_limits<double>::infinity())
      return 0.0;
    return coeff * pmath::exp(r * ln_a + zeta_ln[r]);
  };

  double worst_bound = 0.0;
  std::vector<double> d(extra + 2), dabs(extra + 2);
  for (std::uint32_t k = 1; k <= kmax; ++k) {
    // d[idx] holds d_{k+idx}.
    double fact = 1.0;
    for (std::uint32_t i = 2; i <= k; ++i) fact *= i;
    d[0] = 1.0 / fact;
    dabs[0] = d[0];
    for (std::uint32_t idx = 0; idx <= extra; ++idx) {
      double r = static_cast<double>(k + idx);
      double ratio = -r / ((r - k + 1.0) * (r + 1.0));
      d[idx + 1] = d[idx] * ratio;
      dabs[idx + 1] = std::abs(d[idx + 1]);
    }

    double mean_tail = 0.0;
    double bound = 0.0;
    for (std::uint32_t idx = 0; idx < extra; ++idx) {
      std::uint32_t r = k + idx;
      mean_tail += agg(d[idx], r);
      bound += agg(dabs[idx], r) * zeta_rel[r];
    }
    // Geometric remainder: successive aggregated terms shrink by more than
    // a factor of 10 once r >= 8 (lambda <= 1/2 and the coefficient ratio
    // is below 1/(r+1) there).
    bound += 10.0 * agg(dabs[extra], k + extra);

    // Squared series for sum_j q_j^2: coefficients e_m = sum d_r d_{m-r}.
    double sq_tail = 0.0;
    for (std::uint32_t m = 2 * k; m < 2 * k + extra; ++m) {
      double e = 0.0, eabs = 0.0;
      // Both factors have index >= k, and m < 2k + extra keeps them inside
      // the stored range.
      for (std::uint32_t r = k; r + k <= m; ++r) {
        e += d[r - k] * d[m - r - k];
        eabs += dabs[r - k] * dabs[m - r - k];
      }
      sq_tail += agg(e, m);
      bound += agg(eabs, m) * zeta_rel[m];
      if (m == 2 * k + extra - 1) bound += 10.0 * agg(eabs, m);
    }

    out.mean[k - 1] += mean_tail;
    out.variance[k - 1] += mean_tail - sq_tail;
    worst_bound = std::max(worst_bound, bound);
  }
  out.tail_bound = worst_bound;
  return out;
}

JansonEmbedding janson_embedding(std::uint32_t m, double p) {
  if (m < 2) throw std::domain_error("m must be >= 2");
  check_unit(p, "p");
  const double q = 1.0 - p;
  JansonEmbedding out;
  out.m = m;
  out.p = p;
  out.weights.resize(m);
  for (std::uint32_t i = 1; i < m; ++i) out.weights[i - 1] = i;
  out.weights[m - 1] = 1.0;

  // Increment vectors: drawing a type-i ball adds a fresh singleton with
  // probability p; otherwise the drawn ball's urn grows by one, moving it
  // to the next type (type m-1 hands its whole urn, m balls, to type m;
  // type m stays put but gains one ball).
  out.increments.resize(m);
  for (std::uint32_t i = 1; i <= m; ++i) {
    std::vector<double> grow(m, 0.0);
    if (i < m - 1) {
      grow[i] = 1.0;
      grow[i - 1] = -1.0;
    } else if (i == m - 1) {
      grow[m - 1] = static_cast<double>(m);
      grow[i - 1] = -1.0;
    } else {
      grow[m - 1] = 1.0;
    }
    std::vector<double> fresh(m, 0.0);
    fresh[0] = 1.0;
    out.increments[i - 1] = {{p, fresh}, {q, grow}};
  }

  out.A.assign(m, std::vector<double>(m, 0.0));
  Eigen::MatrixXd a(m, m);
  for (std::uint32_t j = 0; j < m; ++j) {
    std::vector<double> mean(m, 0.0);
    for (const auto& outc : out.increments[j])
      for (std::uint32_t i = 0; i < m; ++i)
        mean[i] += outc.prob * outc.delta[i];
    for (std::uint32_t i = 0; i < m; ++i) {
      out.A[i][j] = out.weights[j] * mean[i];
      a(i, j) = out.A[i][j];
    }
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue computation failed");
  out.spectrum.resize(m);
  for (std::uint32_t i = 0; i < m; ++i) out.spectrum[i] = solver.eigenvalues()[i];
  std::sort(out.spectrum.begin(), out.spectrum.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() > y.real();
              return std::abs(x.imag()) < std::abs(y.imag());
            });
  out.lambda1 = out.spectrum[0].real();
  out.lambda1_imag = out.spectrum[0].imag();
  out.lambda2 = out.spectrum[1].real();
  out.lambda2_imag = out.spectrum[1].imag();
  out.spectral_gap_ok = out.lambda2 < 0.5 * out.lambda1;
  return out;
}

}  // namespace urnlab::theory
