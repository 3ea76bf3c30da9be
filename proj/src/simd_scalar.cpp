// SPDX-License-Identifier: Apache-2.0
#include "batch_scalar.hpp"
#include "kernels.hpp"

namespace urnlab::kern {

const OpsTable& scalar_ops() {
  static constexpr OpsTable table = Drivers<ScalarBatch>::table();
  return table;
}

}  // namespace urnlab::kern
