// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace urnlab {

inline constexpr char kVersion[] = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace urnlab
