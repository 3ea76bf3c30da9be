// SPDX-License-Identifier: Apache-2.0
//
// The only translation unit compiled with -mavx2 -mfma. Nothing here may
// instantiate ScalarBatch templates: symbols emitted under these flags must
// never satisfy a reference from a scalar-path translation unit.
#include "batch_avx2.hpp"
#include "kernels.hpp"

namespace urnlab::kern {

const OpsTable& avx2_ops() {
  static constexpr OpsTable table = Drivers<Avx2Batch>::table();
  return table;
}

}  // namespace urnlab::kern
