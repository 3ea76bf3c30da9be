// SPDX-License-Identifier: Apache-2.0
//
// One-lane reference backend for the shared math kernels (see kernels.hpp).
// Every operation maps to a single IEEE-754 double operation, so wider
// backends that use the per-lane equivalents produce bit-identical lanes.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace urnlab::kern {

struct ScalarBatch {
  static constexpr std::size_t lanes = 1;
  using Mask = bool;

  double v;

  static ScalarBatch splat(double x) noexcept { return {x}; }
  static ScalarBatch load(const double* p) noexcept { return {*p}; }
  void store(double* p) const noexcept { *p = v; }

  friend ScalarBatch operator+(ScalarBatch a, ScalarBatch b) noexcept { return {a.v + b.v}; }
  friend ScalarBatch operator-(ScalarBatch a, ScalarBatch b) noexcept { return {a.v - b.v}; }
  friend ScalarBatch operator*(ScalarBatch a, ScalarBatch b) noexcept { return {a.v * b.v}; }
  friend ScalarBatch operator/(ScalarBatch a, ScalarBatch b) noexcept { return {a.v / b.v}; }

  // Fused multiply-add, single rounding. std::fma is the IEEE operation, so
  // it matches hardware FMA lanes exactly.
  static ScalarBatch fma(ScalarBatch a, ScalarBatch b, ScalarBatch c) noexcept {
    return {std::fma(a.v, b.v, c.v)};
  }

  ScalarBatch floor() const noexcept { return {std::floor(v)}; }

  static Mask le(ScalarBatch a, ScalarBatch b) noexcept { return a.v <= b.v; }
  static Mask lt(ScalarBatch a, ScalarBatch b) noexcept { return a.v < b.v; }
  static ScalarBatch select(Mask m, ScalarBatch a, ScalarBatch b) noexcept {
    return m ? a : b;
  }
  static void store_mask(Mask m, std::uint8_t* out) noexcept { *out = m ? 1 : 0; }

  // Builds 2^k from kds = k + 1.5*2^52 (k integer in [-1100, 1100]) by
  // placing k+1023 into the exponent field. Pure bit manipulation.
  static ScalarBatch pow2_from_shifted(ScalarBatch kds) noexcept {
    const auto bits = std::bit_cast<std::int64_t>(kds.v);
    return {std::bit_cast<double>((bits + 1023) << 52)};
  }

  // Splits a positive normal double into mantissa m in [1,2) and the
  // unbiased exponent e as an exact double.
  static void log_split(ScalarBatch x, ScalarBatch* m, ScalarBatch* e) noexcept {
    const auto bits = std::bit_cast<std::uint64_t>(x.v);
    const auto raw_exp = bits >> 52;
    m->v = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFULL) | 0x3FF0000000000000ULL);
    const double e_plus = std::bit_cast<double>(raw_exp | 0x4330000000000000ULL);
    e->v = e_plus - (4503599627370496.0 + 1023.0);
  }
};

}  // namespace urnlab::kern
