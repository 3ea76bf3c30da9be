// SPDX-License-Identifier: Apache-2.0
//
// Deterministic pseudo-random streams for simulation runs.
//
// Generator: xoshiro256** (Blackman/Vigna), state seeded from four
// successive splitmix64 outputs. Both algorithms use only 64-bit integer
// arithmetic, so a given seed produces the same sequence on every platform.
//
// Stream splitting rule (fixed, part of the reproducibility contract):
//   child_seed(parent, i) = mix64(parent + (i + 1) * 0x9E3779B97F4A7C15)
// where mix64 is the splitmix64 finalizer. Replicate r of a batch with
// master seed S runs on seed child_seed(S, r); a run needing several
// independent streams (placement draws vs. accept/branch decisions) derives
// them from its replicate seed the same way. The "+1" keeps index 0 from
// echoing the parent stream.

#pragma once

#include <cstdint>

namespace urnlab {

inline constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer; bijective on 64-bit ints.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent + (index + 1) * kSeedStride);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed) noexcept {
    // splitmix64 stream, one step per state word.
    std::uint64_t z = seed;
    for (auto& w : s_) {
      z += kSeedStride;
      w = mix64(z);
    }
  }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  constexpr std::uint64_t operator()() noexcept { return next(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~0ULL; }

  // Uniform on [0,1), 52-bit resolution. The top 52 bits are used so the
  // same value is recoverable from a 4-lane integer path that has no
  // 64-bit-to-double conversion.
  constexpr double u01() noexcept {
    return static_cast<double>(next() >> 12) * 0x1.0p-52;
  }

  // Uniform on (0,1]; safe as a log() argument.
  constexpr double u01_pos() noexcept {
    return static_cast<double>((next() >> 12) + 1) * 0x1.0p-52;
  }

  // Uniform on {0, ..., bound-1}, unbiased (Lemire's multiply-reject).
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t floor = (0 - bound) % bound;
      while (lo < floor) {
        x = next();
        m = static_cast<unsigned __int128>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
};

}  // namespace urnlab
