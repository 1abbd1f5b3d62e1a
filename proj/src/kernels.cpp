// Copyright 2026 The nibp-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nibp/kernels.hpp"

namespace nibp {

CMatrix embed_operator(const CMatrix& op, std::span<const int> targets, int num_qubits) {
  detail::check_targets(targets, num_qubits, op.rows());
  const auto offsets = detail::local_offsets(targets, num_qubits);
  const std::size_t mask = detail::target_mask(targets, num_qubits);
  const std::size_t d = dimension(num_qubits);
  CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t base = 0; base < d; ++base) {
    if (base & mask) continue;
    for (std::size_t a = 0; a < offsets.size(); ++a) {
      for (std::size_t b = 0; b < offsets.size(); ++b) {
        full(static_cast<Eigen::Index>(base | offsets[a]),
             static_cast<Eigen::Index>(base | offsets[b])) =
            op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  return full;
}

}  // namespace nibp
