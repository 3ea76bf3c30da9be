// SPDX-License-Identifier: Apache-2.0
//
// Portable scalar special functions. exp/log/log1p01 are the one-lane
// instantiations of the shared sampler kernels, so every value computed
// here matches the SIMD paths bit for bit and is stable across platforms
// and libm versions. lgamma/beta/zeta sit on top of them.

#pragma once

namespace urnlab::pmath {

double exp(double x) noexcept;      // saturates outside [-708, 709]
double log(double x) noexcept;      // x positive normal
double log1p01(double t) noexcept;  // t in [0,1]
double pow(double base, double e) noexcept;  // base positive normal

// ln Gamma(x), x > 0. Relative error well under 1e-12 on [0.1, 1e6].
double lgamma(double x) noexcept;

// Euler-Maclaurin evaluation with a certified remainder: |true - value| is
// at most tail_bound (first omitted correction term; the series is
// enveloping for real s > 1).
struct SeriesValue {
  double value;
  double tail_bound;
};

SeriesValue zeta_em(double s) noexcept;                  // Riemann zeta, s > 1
SeriesValue hurwitz_zeta_em(double s, double a) noexcept;  // sum_{j>=0} (a+j)^-s

}  // namespace urnlab::pmath
