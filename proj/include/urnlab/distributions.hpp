// SPDX-License-Identifier: Apache-2.0
//
// Samplers and special functions shared by all models.

#pragma once

#include <urnlab/math.hpp>
#include <urnlab/rng.hpp>
#include <urnlab/simd.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>

namespace urnlab {

// Power-law urn probabilities p_j = C j^(-1/theta), j >= 1, normalized over
// the infinite support: C = 1/zeta(1/theta).
struct ZipfLaw {
  double theta;  // in (0,1)
  double s;      // 1/theta
  double C;      // 1/zeta(s)

  // throws std::domain_error unless 0 < theta < 1
  explicit ZipfLaw(double theta_);

  // Cached candidate-transform parameters for the rejection sampler.
  simd::ZetaCandidateParams candidate;
};

double zipf_pmf(const ZipfLaw& law, std::uint64_t j);

// One exact draw. Returns the urn index as an integer-valued double: the
// law's support is unbounded and draws above 2^53 are legitimate (though
// vanishingly rare) once theta is close to 1, so no integer type fits.
double zipf_sample(const ZipfLaw& law, Rng& rng);

// Block-buffered equivalent of zipf_sample: consumes the same uniforms in
// the same order, so it yields the exact same draw sequence, just faster
// (candidates are transformed through the batched kernels). Holds no Rng:
// pass the same stream to every call.
class ZipfSampler {
 public:
  explicit ZipfSampler(const ZipfLaw& law);

  double next(Rng& rng) {
    if (out_pos_ == out_len_) refill(rng);
    return out_[out_pos_++];
  }

 private:
  void refill(Rng& rng);

  static constexpr std::size_t kBlock = 512;
  simd::ZetaCandidateParams par_;
  std::unique_ptr<double[]> buf_;  // u | v | x | out
  std::uint8_t accept_[kBlock];
  std::size_t out_pos_ = 0;
  std::size_t out_len_ = 0;
  double* out_ = nullptr;
};

// Exact inversion sampler (CDF walk from the mode). Total-variation error
// from pmf rounding stays below ~1e-8 for mean up to 1e7.
std::uint64_t poisson_sample(double mean, Rng& rng);

double ln_gamma(double x);          // x > 0
double beta(double a, double b);    // a, b > 0
double zeta(double s);              // s > 1

}  // namespace urnlab
