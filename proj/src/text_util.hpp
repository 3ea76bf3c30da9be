// SPDX-License-Identifier: Apache-2.0
//
// Locale-independent number formatting. std::to_chars never consults the
// locale, so output is identical regardless of the host environment.

#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace urnlab {

// Shortest decimal string that round-trips the value.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace urnlab
