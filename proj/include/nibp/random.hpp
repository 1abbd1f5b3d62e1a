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

#include <cstdint>
#include <initializer_list>
#include <random>

#include "nibp/pauli.hpp"

namespace nibp {

using Rng = std::mt19937_64;

/// Counter-based seed splitting (splitmix64 finalizer). Stream k of a root
/// seed is the same no matter which worker or in which order it is drawn.
std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream);
/// Successive splitting along a path of stream ids.
std::uint64_t split_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);
Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> path = {});

double uniform(Rng& rng, double lo, double hi);

/// Haar-random unitary of the given size (QR of a Ginibre matrix with the
/// phases of R's diagonal divided out).
CMatrix haar_unitary(Eigen::Index size, Rng& rng);
/// First `cols` columns of a Haar unitary of size `rows`.
CMatrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng);

CVector random_statevector(int num_qubits, Rng& rng);
DensityMatrix random_pure_state(int num_qubits, Rng& rng);
/// G G^dagger / Tr with G a d x rank Ginibre matrix; rank 0 means full rank.
DensityMatrix random_mixed_state(int num_qubits, Rng& rng, Eigen::Index rank = 0);

}  // namespace nibp
