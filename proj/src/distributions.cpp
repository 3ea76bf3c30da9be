// SPDX-License-Identifier: Apache-2.0
#include <urnlab/distributions.hpp>

#include <cmath>
#include <stdexcept>

namespace urnlab {

ZipfLaw::ZipfLaw(double theta_) : theta(theta_) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::domain_error("ZipfLaw: theta must lie in (0,1)");
  s = 1.0 / theta;
  C = 1.0 / pmath::zeta_em(s).value;
  const double am1 = s - 1.0;
  const double b = pmath::pow(2.0, am1);
  candidate = {-1.0 / am1, am1, (b - 1.0) / b};
}

double zipf_pmf(const ZipfLaw& law, std::uint64_t j) {
  if (j == 0) throw std::domain_error("zipf_pmf: j must be >= 1");
  if (j == 1) return law.C;
  return law.C * pmath::exp(-law.s * pmath::log(static_cast<double>(j)));
}

double zipf_sample(const ZipfLaw& law, Rng& rng) {
  for (;;) {
    const double u = rng.u01_pos();
    const double v = rng.u01();
    double x;
    std::uint8_t acc;
    simd::zeta_candidates_n(&u, &v, law.candidate, &x, &acc, 1);
    if (acc) return x;
  }
}

ZipfSampler::ZipfSampler(const ZipfLaw& law)
    : par_(law.candidate), buf_(new double[4 * kBlock]) {
  out_ = buf_.get() + 3 * kBlock;
}

void ZipfSampler::refill(Rng& rng) {
  double* u = buf_.get();
  double* v = u + kBlock;
  double* x = v + kBlock;
  out_len_ = 0;
  while (out_len_ == 0) {
    // Interleaved u,v draws keep the stream identical to one-at-a-time
    // candidate generation, so trajectories do not depend on kBlock.
    for (std::size_t i = 0; i < kBlock; ++i) {
      u[i] = rng.u01_pos();
      v[i] = rng.u01();
    }
    simd::zeta_candidates_n(u, v, par_, x, accept_, kBlock);
    for (std::size_t i = 0; i < kBlock; ++i)
      if (accept_[i]) out_[out_len_++] = x[i];
  }
  out_pos_ = 0;
}

std::uint64_t poisson_sample(double mean, Rng& rng) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson_sample: mean must be >= 0");
  if (mean == 0.0) return 0;

  if (mean < 10.0) {
    // Bottom-up CDF inversion.
    const double u = rng.u01();
    double p = pmath::exp(-mean);
    double cum = p;
    std::uint64_t k = 0;
    while (u > cum) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
      if (p < 1e-300) break;  // u inside float-rounding slack of 1
    }
    return k;
  }

  // Mode-centered two-sided CDF walk; O(sqrt(mean)) expected steps.
  const double lm = pmath::log(mean);
  const auto mode = static_cast<std::uint64_t>(mean);
  const double pm =
      pmath::exp(static_cast<double>(mode) * lm - mean - pmath::lgamma(static_cast<double>(mode) + 1.0));
  const double u = rng.u01();
  double cum = pm;
  if (u <= cum) return mode;
  double pr = pm, pl = pm;
  std::uint64_t kr = mode, kl = mode;
  for (;;) {
    ++kr;
    pr *= mean / static_cast<double>(kr);
    cum += pr;
    if (u <= cum) return kr;
    if (kl > 0) {
      pl *= static_cast<double>(kl) / mean;
      --kl;
      cum += pl;
      if (u <= cum) return kl;
    }
    if (pr < 1e-300 && (kl == 0 || pl < 1e-300)) return kr;
  }
}

double ln_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("ln_gamma: x must be > 0");
  return pmath::lgamma(x);
}

double beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta: arguments must be > 0");
  return pmath::exp(pmath::lgamma(a) + pmath::lgamma(b) - pmath::lgamma(a + b));
}

double zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta: s must be > 1");
  return pmath::zeta_em(s).value;
}

}  // namespace urnlab
