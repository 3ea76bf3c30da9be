// SPDX-License-Identifier: Apache-2.0
//
// Four-lane AVX2+FMA backend. Compile only with -mavx2 -mfma; callers must
// gate on runtime CPU detection. Each operation is the per-lane equivalent
// of the ScalarBatch one (same IEEE rounding, fused FMA, ordered compares),
// which is what makes the kernel outputs bit-identical.

#pragma once

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

namespace urnlab::kern {

struct Avx2Batch {
  static constexpr std::size_t lanes = 4;
  using Mask = __m256d;

  __m256d v;

  static Avx2Batch splat(double x) noexcept { return {_mm256_set1_pd(x)}; }
  static Avx2Batch load(const double* p) noexcept { return {_mm256_loadu_pd(p)}; }
  void store(double* p) const noexcept { _mm256_storeu_pd(p, v); }

  friend Avx2Batch operator+(Avx2Batch a, Avx2Batch b) noexcept { return {_mm256_add_pd(a.v, b.v)}; }
  friend Avx2Batch operator-(Avx2Batch a, Avx2Batch b) noexcept { return {_mm256_sub_pd(a.v, b.v)}; }
  friend Avx2Batch operator*(Avx2Batch a, Avx2Batch b) noexcept { return {_mm256_mul_pd(a.v, b.v)}; }
  friend Avx2Batch operator/(Avx2Batch a, Avx2Batch b) noexcept { return {_mm256_div_pd(a.v, b.v)}; }

  static Avx2Batch fma(Avx2Batch a, Avx2Batch b, Avx2Batch c) noexcept {
    return {_mm256_fmadd_pd(a.v, b.v, c.v)};
  }

  Avx2Batch floor() const noexcept {
    return {_mm256_round_pd(v, _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC)};
  }

  static Mask le(Avx2Batch a, Avx2Batch b) noexcept {
    return _mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ);
  }
  static Mask lt(Avx2Batch a, Avx2Batch b) noexcept {
    return _mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ);
  }
  static Avx2Batch select(Mask m, Avx2Batch a, Avx2Batch b) noexcept {
    return {_mm256_blendv_pd(b.v, a.v, m)};
  }
  static void store_mask(Mask m, std::uint8_t* out) noexcept {
    const int bits = _mm256_movemask_pd(m);
    out[0] = static_cast<std::uint8_t>(bits & 1);
    out[1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out[2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out[3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }

  static Avx2Batch pow2_from_shifted(Avx2Batch kds) noexcept {
    const __m256i bits = _mm256_castpd_si256(kds.v);
    const __m256i ex = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
    return {_mm256_castsi256_pd(ex)};
  }

  static void log_split(Avx2Batch x, Avx2Batch* m, Avx2Batch* e) noexcept {
    const __m256i bits = _mm256_castpd_si256(x.v);
    const __m256i raw_exp = _mm256_srli_epi64(bits, 52);
    const __m256i m_bits = _mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
        _mm256_set1_epi64x(0x3FF0000000000000LL));
    const __m256i e_bits = _mm256_or_si256(raw_exp, _mm256_set1_epi64x(0x4330000000000000LL));
    const __m256d e_plus = _mm256_castsi256_pd(e_bits);
    m->v = _mm256_castsi256_pd(m_bits);
    e->v = _mm256_sub_pd(e_plus, _mm256_set1_pd(4503599627370496.0 + 1023.0));
  }
};

}  // namespace urnlab::kern
