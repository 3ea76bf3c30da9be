// SPDX-License-Identifier: Apache-2.0
#include <urnlab/math.hpp>

#include "batch_scalar.hpp"
#include "kernels.hpp"

#include <cmath>

namespace urnlab::pmath {

using kern::ScalarBatch;

double exp(double x) noexcept { return kern::exp_b(ScalarBatch{x}).v; }
double log(double x) noexcept { return kern::log_b(ScalarBatch{x}).v; }
double log1p01(double t) noexcept { return kern::log1p01_b(ScalarBatch{t}).v; }

double pow(double base, double e) noexcept { return exp(e * log(base)); }

namespace {

constexpr double kHalfLn2Pi = 0.9189385332046728;  // ln(2*pi)/2

// Asymptotic series coefficients B_{2k+2} / ((2k+2)(2k+1)).
constexpr double kStirling[7] = {
    0.08333333333333333,   -0.002777777777777778, 0.0007936507936507937,
    -0.0005952380952380953, 0.0008417508417508417, -0.0019175269175269176,
    0.00641025641025641,
};

// Euler-Maclaurin correction coefficients B_{2k} / (2k)!.
constexpr double kEmCoeff[8] = {
    0.08333333333333333,    -0.001388888888888889, 3.306878306878307e-05,
    -8.267195767195768e-07, 2.08767569878681e-08,  -5.284190138687493e-10,
    1.3382536530684679e-11, -3.3896802963225827e-13,
};

}  // namespace

double lgamma(double x) noexcept {
  // Shift into the asymptotic regime, then Stirling with 7 correction terms
  // (next term below 1e-15 absolute at x = 8).
  double shift_product = 1.0;
  double w = x;
  while (w < 8.0) {
    shift_product *= w;
    w += 1.0;
  }
  const double lw = log(w);
  const double t = 1.0 / (w * w);
  double p = kStirling[6];
  for (int k = 5; k >= 0; --k) p = p * t + kStirling[k];
  double result = (w - 0.5) * lw - w + kHalfLn2Pi + p / w;
  if (shift_product != 1.0) result -= log(shift_product);
  return result;
}

// Core Euler-Maclaurin step:
//   sum_{j>=0} (a+j)^-s = [explicit head] + A^{1-s}/(s-1) + A^-s/2
//                         + sum_k B_{2k}/(2k)! (s)_{2k-1} A^{-s-2k+1} + R
// with A = a + head_terms. For real s > 1 the corrections alternate and
// envelope, so |R| <= first omitted term.
static SeriesValue em_tail(double s, double a) noexcept {
  int head = 0;
  if (a < 16.0) head = static_cast<int>(16.0 - a) + 1;
  double sum = 0.0;
  for (int j = 0; j < head; ++j) sum += pow(a + j, -s);
  const double A = a + head;
  const double lnA = log(A);
  const double A_pow_ms = exp(-s * lnA);  // A^-s
  sum += A_pow_ms * A / (s - 1.0);        // A^{1-s}/(s-1)
  sum += 0.5 * A_pow_ms;

  double rising = s;           // (s)(s+1)...(s+2k-2), starts at k=1 with just s
  double A_pow = A_pow_ms / A;  // A^{-s-2k+1} at k=1
  const double invA2 = 1.0 / (A * A);
  double term = 0.0;
  for (int k = 0; k < 8; ++k) {
    term = kEmCoeff[k] * rising * A_pow;
    if (k == 7) break;  // term is now the remainder bound
    sum += term;
    rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
    A_pow *= invA2;
  }
  return {sum, std::abs(term)};
}

SeriesValue zeta_em(double s) noexcept { return em_tail(s, 1.0); }

SeriesValue hurwitz_zeta_em(double s, double a) noexcept { return em_tail(s, a); }

}  // namespace urnlab::pmath
