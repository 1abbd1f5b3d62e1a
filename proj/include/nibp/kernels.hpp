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

#pragma once

#include <span>
#include <vector>

#include "nibp/types.hpp"

namespace nibp {

// Kernels that act with a k-qubit operator on selected qubits of an n-qubit
// operator without building the 2^n x 2^n embedding. The local operator's
// index uses targets[0] as its most significant bit.

namespace detail {

inline std::vector<std::size_t> local_offsets(std::span<const int> targets, int num_qubits) {
  const std::size_t k = targets.size();
  std::vector<std::size_t> offsets(std::size_t{1} << k, 0);
  for (std::size_t a = 0; a < offsets.size(); ++a) {
    for (std::size_t i = 0; i < k; ++i) {
      if ((a >> (k - 1 - i)) & 1) {
        offsets[a] |= std::size_t{1} << (num_qubits - 1 - targets[i]);
      }
    }
  }
  return offsets;
}

inline std::size_t target_mask(std::span<const int> targets, int num_qubits) {
  std::size_t mask = 0;
  for (int t : targets) mask |= std::size_t{1} << (num_qubits - 1 - t);
  return mask;
}

inline void check_targets(std::span<const int> targets, int num_qubits, Eigen::Index op_dim) {
  if ((Eigen::Index{1} << targets.size()) != op_dim) {
    throw DimensionError("local operator size does not match target count");
  }
  std::size_t seen = 0;
  for (int t : targets) {
    if (t < 0 || t >= num_qubits) throw DimensionError("target qubit out of range");
    const std::size_t bit = std::size_t{1} << t;
    if (seen & bit) throw DimensionError("repeated target qubit");
    seen |= bit;
  }
}

}  // namespace detail

/// m <- (op on targets) * m, in place.
template <typename Derived>
void apply_local_left(const CMatrix& op, std::span<const int> targets, int num_qubits,
                      Eigen::MatrixBase<Derived>& m) {
  detail::check_targets(targets, num_qubits, op.rows());
  const auto offsets = detail::local_offsets(targets, num_qubits);
  const std::size_t mask = detail::target_mask(targets, num_qubits);
  const auto local = static_cast<Eigen::Index>(offsets.size());
  const auto d = static_cast<std::size_t>(m.rows());
  CVector in(local);
  CVector out(local);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::size_t base = 0; base < d; ++base) {
      if (base & mask) continue;
      for (Eigen::Index a = 0; a < local; ++a) {
        in(a) = m(static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(a)]), c);
      }
      out.noalias() = op * in;
      for (Eigen::Index a = 0; a < local; ++a) {
        m(static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(a)]), c) = out(a);
      }
    }
  }
}

/// m <- m * (op on targets)^dagger, in place.
template <typename Derived>
void apply_local_right_adjoint(const CMatrix& op, std::span<const int> targets,
                               int num_qubits, Eigen::MatrixBase<Derived>& m) {
  detail::check_targets(targets, num_qubits, op.rows());
  const auto offsets = detail::local_offsets(targets, num_qubits);
  const std::size_t mask = detail::target_mask(targets, num_qubits);
  const auto local = static_cast<Eigen::Index>(offsets.size());
  const auto d = static_cast<std::size_t>(m.cols());
  const CMatrix op_conj = op.conjugate();
  CVector in(local);
  CVector out(local);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (std::size_t base = 0; base < d; ++base) {
      if (base & mask) continue;
      for (Eigen::Index a = 0; a < local; ++a) {
        in(a) = m(r, static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(a)]));
      }
      out.noalias() = op_conj * in;
      for (Eigen::Index a = 0; a < local; ++a) {
        m(r, static_cast<Eigen::Index>(base | offsets[static_cast<std::size_t>(a)])) = out(a);
      }
    }
  }
}

/// op rho op^dagger with op acting on `targets`.
template <typename Derived>
typename Derived::PlainObject conjugate_local(const CMatrix& op, std::span<const int> targets,
                                              int num_qubits,
                                              const Eigen::MatrixBase<Derived>& rho) {
  typename Derived::PlainObject out = rho;
  apply_local_left(op, targets, num_qubits, out);
  apply_local_right_adjoint(op, targets, num_qubits, out);
  return out;
}

/// sum_a K_a rho K_a^dagger with every K_a acting on `targets`.
template <typename Derived>
typename Derived::PlainObject apply_kraus_local(const std::vector<CMatrix>& kraus,
                                                std::span<const int> targets, int num_qubits,
                                                const Eigen::MatrixBase<Derived>& rho) {
  typename Derived::PlainObject out =
      Derived::PlainObject::Zero(rho.rows(), rho.cols());
  for (const CMatrix& k : kraus) out += conjugate_local(k, targets, num_qubits, rho);
  return out;
}

/// Full 2^n x 2^n matrix of `op` acting on `targets`, identity elsewhere.
CMatrix embed_operator(const CMatrix& op, std::span<const int> targets, int num_qubits);

}  // namespace nibp
