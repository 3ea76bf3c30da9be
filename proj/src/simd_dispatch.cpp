// SPDX-License-Identifier: Apache-2.0
#include <urnlab/simd.hpp>

#include "kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace urnlab {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(URNLAB_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const kern::OpsTable* table_for(SimdTier tier) noexcept {
#if defined(URNLAB_BUILD_AVX2)
  if (tier == SimdTier::avx2) return &kern::avx2_ops();
#else
  (void)tier;
#endif
  return &kern::scalar_ops();
}

struct Active {
  SimdTier tier;
  const kern::OpsTable* ops;
};

Active detect_initial() noexcept {
  SimdTier tier = cpu_has_avx2() ? SimdTier::avx2 : SimdTier::scalar;
  if (const char* env = std::getenv("URNLAB_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") tier = SimdTier::scalar;
    if (want == "avx2" && cpu_has_avx2()) tier = SimdTier::avx2;
  }
  return {tier, table_for(tier)};
}

std::atomic<const kern::OpsTable*>& active_ops() noexcept {
  static std::atomic<const kern::OpsTable*> ops{detect_initial().ops};
  return ops;
}

std::atomic<SimdTier>& active_tier_slot() noexcept {
  static std::atomic<SimdTier> tier{detect_initial().tier};
  return tier;
}

}  // namespace

std::string_view simd_tier_name(SimdTier tier) noexcept {
  return tier == SimdTier::avx2 ? "avx2" : "scalar";
}

bool simd_tier_available(SimdTier tier) noexcept {
  if (tier == SimdTier::scalar) return true;
  return cpu_has_avx2();
}

SimdTier active_simd_tier() noexcept { return active_tier_slot().load(); }

bool set_simd_tier(SimdTier tier) noexcept {
  if (!simd_tier_available(tier)) return false;
  active_tier_slot().store(tier);
  active_ops().store(table_for(tier));
  return true;
}

namespace simd {

// Bulk through the active tier, remainder through the scalar lanes; both
// compute the same function bit for bit.
void exp_n(const double* x, double* y, std::size_t n) {
  const auto& t = *active_ops().load();
  const std::size_t bulk = n - n % t.lanes;
  t.exp_n(x, y, bulk);
  if (bulk != n) kern::scalar_ops().exp_n(x + bulk, y + bulk, n - bulk);
}

void log_n(const double* x, double* y, std::size_t n) {
  const auto& t = *active_ops().load();
  const std::size_t bulk = n - n % t.lanes;
  t.log_n(x, y, bulk);
  if (bulk != n) kern::scalar_ops().log_n(x + bulk, y + bulk, n - bulk);
}

void log1p01_n(const double* x, double* y, std::size_t n) {
  const auto& t = *active_ops().load();
  const std::size_t bulk = n - n % t.lanes;
  t.log1p01_n(x, y, bulk);
  if (bulk != n) kern::scalar_ops().log1p01_n(x + bulk, y + bulk, n - bulk);
}

void zeta_candidates_n(const double* u, const double* v, const ZetaCandidateParams& params,
                       double* x, std::uint8_t* accept, std::size_t n) {
  const auto& t = *active_ops().load();
  const std::size_t bulk = n - n % t.lanes;
  t.zeta_candidates_n(u, v, params, x, accept, bulk);
  if (bulk != n)
    kern::scalar_ops().zeta_candidates_n(u + bulk, v + bulk, params, x + bulk, accept + bulk,
                                         n - bulk);
}

}  // namespace simd
}  // namespace urnlab
