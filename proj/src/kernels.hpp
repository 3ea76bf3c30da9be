// SPDX-License-Identifier: Apache-2.0
//
// Shared elementwise math kernels, templated over a batch backend.
//
// Backend contract (see batch_scalar.hpp for the reference): lanes, splat,
// load/store, +,-,*,/ (IEEE correctly rounded), fma (single rounding), floor,
// le/lt (ordered, false on NaN), select, store_mask, pow2_from_shifted,
// log_split. Every kernel below is a fixed dataflow of those operations, so
// all backends produce bit-identical lanes. Reductions never happen here.

#pragma once

#include <urnlab/simd.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>

namespace urnlab::kern {

using simd::ZetaCandidateParams;

inline constexpr double kLn2Hi = 0x1.62e42f8000000p-1;   // high 29 bits of ln 2
inline constexpr double kLn2Lo = 0x1.be8e7bcd5e4f2p-27;  // ln 2 - kLn2Hi
inline constexpr double kInvLn2 = 1.4426950408889634;
inline constexpr double kExpShift = 6755399441055744.0;  // 1.5 * 2^52
inline constexpr double kSqrt2 = 1.4142135623730951;

// Cutoffs chosen so the exponent-field trick in pow2_from_shifted never
// wraps: above kExpHi the result saturates to +inf a little before the true
// overflow threshold (709.78), below kExpLo it flushes to zero instead of
// producing subnormals. Both shortcuts are irrelevant at the magnitudes the
// samplers and series evaluations feed in.
inline constexpr double kExpHi = 709.0;
inline constexpr double kExpLo = -708.0;

// exp(x); relative error a few ulp on [kExpLo, kExpHi].
template <class B>
inline B exp_b(B x) {
  const B kds = B::fma(x, B::splat(kInvLn2), B::splat(kExpShift));
  const B kd = kds - B::splat(kExpShift);  // round-to-nearest(x / ln2), exact
  B r = B::fma(kd, B::splat(-kLn2Hi), x);
  r = B::fma(kd, B::splat(-kLn2Lo), r);

  // Taylor series of e^r on |r| <= 0.35 (degree 14).
  B p = B::splat(1.1470745597729725e-11);
  p = B::fma(p, r, B::splat(1.6059043836821613e-10));
  p = B::fma(p, r, B::splat(2.08767569878681e-09));
  p = B::fma(p, r, B::splat(2.505210838544172e-08));
  p = B::fma(p, r, B::splat(2.755731922398589e-07));
  p = B::fma(p, r, B::splat(2.7557319223985893e-06));
  p = B::fma(p, r, B::splat(2.48015873015873e-05));
  p = B::fma(p, r, B::splat(0.0001984126984126984));
  p = B::fma(p, r, B::splat(0.001388888888888889));
  p = B::fma(p, r, B::splat(0.008333333333333333));
  p = B::fma(p, r, B::splat(0.041666666666666664));
  p = B::fma(p, r, B::splat(0.16666666666666666));
  p = B::fma(p, r, B::splat(0.5));
  p = B::fma(p, r, B::splat(1.0));
  p = B::fma(p, r, B::splat(1.0));

  B result = p * B::pow2_from_shifted(kds);
  result = B::select(B::lt(x, B::splat(kExpLo)), B::splat(0.0), result);
  result = B::select(B::lt(B::splat(kExpHi), x), B::splat(std::numeric_limits<double>::infinity()), result);
  return result;
}

// log(x) for positive normal x; relative error a few ulp.
template <class B>
inline B log_b(B x) {
  B m0, e0;
  B::log_split(x, &m0, &e0);
  // Recenter the mantissa on [sqrt2/2, sqrt2] so |log m| <= ln(2)/2.
  const auto shrink = B::lt(B::splat(kSqrt2), m0);
  const B m = B::select(shrink, m0 * B::splat(0.5), m0);
  const B e = B::select(shrink, e0 + B::splat(1.0), e0);

  const B s = (m - B::splat(1.0)) / (m + B::splat(1.0));
  const B z = s * s;
  // atanh tail: sum 1/(2k+1) z^k, |s| <= 0.1716
  B p = B::splat(0.04);
  p = B::fma(p, z, B::splat(0.043478260869565216));
  p = B::fma(p, z, B::splat(0.047619047619047616));
  p = B::fma(p, z, B::splat(0.05263157894736842));
  p = B::fma(p, z, B::splat(0.058823529411764705));
  p = B::fma(p, z, B::splat(0.06666666666666667));
  p = B::fma(p, z, B::splat(0.07692307692307693));
  p = B::fma(p, z, B::splat(0.09090909090909091));
  p = B::fma(p, z, B::splat(0.1111111111111111));
  p = B::fma(p, z, B::splat(0.14285714285714285));
  p = B::fma(p, z, B::splat(0.2));
  p = B::fma(p, z, B::splat(0.3333333333333333));

  const B s2 = s + s;
  const B core = B::fma(s2 * z, p, s2);  // 2 atanh(s)
  B out = B::fma(e, B::splat(kLn2Hi), core);
  out = B::fma(e, B::splat(kLn2Lo), out);
  return out;
}

// log(1+t) for t in [0,1]; relative error a few ulp.
template <class B>
inline B log1p01_b(B t) {
  const B s = t / (t + B::splat(2.0));  // s in [0, 1/3]
  const B z = s * s;
  B p = B::splat(0.02857142857142857);
  p = B::fma(p, z, B::splat(0.030303030303030304));
  p = B::fma(p, z, B::splat(0.03225806451612903));
  p = B::fma(p, z, B::splat(0.034482758620689655));
  p = B::fma(p, z, B::splat(0.037037037037037035));
  p = B::fma(p, z, B::splat(0.04));
  p = B::fma(p, z, B::splat(0.043478260869565216));
  p = B::fma(p, z, B::splat(0.047619047619047616));
  p = B::fma(p, z, B::splat(0.05263157894736842));
  p = B::fma(p, z, B::splat(0.058823529411764705));
  p = B::fma(p, z, B::splat(0.06666666666666667));
  p = B::fma(p, z, B::splat(0.07692307692307693));
  p = B::fma(p, z, B::splat(0.09090909090909091));
  p = B::fma(p, z, B::splat(0.1111111111111111));
  p = B::fma(p, z, B::splat(0.14285714285714285));
  p = B::fma(p, z, B::splat(0.2));
  p = B::fma(p, z, B::splat(0.3333333333333333));
  const B s2 = s + s;
  return B::fma(s2 * z, p, s2);
}

// Candidate step of the rejection sampler for the zeta distribution with
// pmf proportional to j^(-a), a > 1 (Devroye's method). Given uniforms
// u in (0,1] and v in [0,1), emits the candidate x = floor(u^(-1/(a-1)))
// and its accept flag:  v * x * (t-1) <= t * (b-1)/b  with
// t = (1+1/x)^(a-1), b = 2^(a-1). A candidate that overflows to +inf
// (possible only for a within ~1e-2 of 1) yields NaN on the left side and
// is rejected by the ordered compare, in every backend alike.
template <class B>
inline void zeta_candidates_b(const double* u, const double* v,
                              const ZetaCandidateParams& par, double* x_out,
                              std::uint8_t* accept_out) {
  const B lnu = log_b(B::load(u));
  const B x = exp_b(lnu * B::splat(par.neg_inv_am1)).floor();
  const B t = exp_b(B::splat(par.am1) * log1p01_b(B::splat(1.0) / x));
  const B lhs = B::load(v) * x * (t - B::splat(1.0));
  const B rhs = t * B::splat(par.bm1_over_b);
  x.store(x_out);
  B::store_mask(B::le(lhs, rhs), accept_out);
}

// Whole-batch array drivers. Each backend's translation unit instantiates
// only its own batch type (no scalar tail lanes here), so no function
// compiled under wider ISA flags can be picked for a scalar-path symbol.
// Callers route the n % lanes remainder through the scalar table, which is
// bit-identical per lane anyway.
struct OpsTable {
  std::size_t lanes;
  void (*exp_n)(const double*, double*, std::size_t);
  void (*log_n)(const double*, double*, std::size_t);
  void (*log1p01_n)(const double*, double*, std::size_t);
  void (*zeta_candidates_n)(const double*, const double*, const ZetaCandidateParams&,
                            double*, std::uint8_t*, std::size_t);
};

template <class B>
struct Drivers {
  // pre: n is a multiple of B::lanes
  static void exp_n(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; i += B::lanes) exp_b(B::load(x + i)).store(y + i);
  }
  static void log_n(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; i += B::lanes) log_b(B::load(x + i)).store(y + i);
  }
  static void log1p01_n(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; i += B::lanes) log1p01_b(B::load(x + i)).store(y + i);
  }
  static void zeta_candidates_n(const double* u, const double* v,
                                const ZetaCandidateParams& par, double* x,
                                std::uint8_t* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; i += B::lanes)
      zeta_candidates_b<B>(u + i, v + i, par, x + i, acc + i);
  }
  static constexpr OpsTable table() {
    return {B::lanes, &exp_n, &log_n, &log1p01_n, &zeta_candidates_n};
  }
};

const OpsTable& scalar_ops();
#if defined(URNLAB_BUILD_AVX2)
const OpsTable& avx2_ops();
#endif

}  // namespace urnlab::kern
