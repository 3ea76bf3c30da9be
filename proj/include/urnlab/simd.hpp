// SPDX-License-Identifier: Apache-2.0
//
// Runtime selection between the scalar reference kernels and the AVX2
// variants, plus the batched entry points the samplers use.
//
// Every batched operation is elementwise and produces bit-identical output
// under either tier; the tier only changes throughput. Selection order:
// explicit set_simd_tier() call, else the URNLAB_SIMD environment variable
// ("scalar" or "avx2"), else CPU detection.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace urnlab {

enum class SimdTier { scalar, avx2 };

std::string_view simd_tier_name(SimdTier tier) noexcept;

// True if this binary carries the tier's kernels and the CPU can run them.
bool simd_tier_available(SimdTier tier) noexcept;

SimdTier active_simd_tier() noexcept;

// Returns false (and changes nothing) if the tier is unavailable.
// Not thread-safe against in-flight batched calls; select before spawning
// simulation threads.
bool set_simd_tier(SimdTier tier) noexcept;

namespace simd {

// y[i] = exp(x[i]); saturates to +inf above 709, flushes to 0 below -708.
void exp_n(const double* x, double* y, std::size_t n);
// y[i] = log(x[i]); inputs must be positive normal doubles.
void log_n(const double* x, double* y, std::size_t n);
// y[i] = log1p(x[i]) for x[i] in [0,1].
void log1p01_n(const double* x, double* y, std::size_t n);

struct ZetaCandidateParams {
  double neg_inv_am1;
  double am1;
  double bm1_over_b;
};

// Rejection-sampler candidate transform; see distributions.cpp for the
// accept inequality. u in (0,1], v in [0,1).
void zeta_candidates_n(const double* u, const double* v, const ZetaCandidateParams& params,
                       double* x, std::uint8_t* accept, std::size_t n);

}  // namespace simd
}  // namespace urnlab
