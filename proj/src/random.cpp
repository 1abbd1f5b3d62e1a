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

#include "nibp/random.hpp"

#include <cmath>

namespace nibp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex{re, im};
    }
  }
  return g;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

std::uint64_t split_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = root;
  for (std::uint64_t p : path) s = split_seed(s, p);
  return s;
}

Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  return Rng(split_seed(root, path));
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

CMatrix haar_unitary(Eigen::Index size, Rng& rng) {
  const CMatrix g = ginibre(size, size, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(size, size);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < size; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

CMatrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (cols > rows) throw PreconditionError("isometry needs rows >= cols");
  return haar_unitary(rows, rng).leftCols(cols);
}

CVector random_statevector(int num_qubits, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  CVector psi = ginibre(d, 1, rng).col(0);
  return psi / psi.norm();
}

DensityMatrix random_pure_state(int num_qubits, Rng& rng) {
  return DensityMatrix::from_statevector(num_qubits, random_statevector(num_qubits, rng));
}

DensityMatrix random_mixed_state(int num_qubits, Rng& rng, Eigen::Index rank) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  if (rank <= 0) rank = d;
  const CMatrix g = ginibre(d, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(num_qubits, std::move(rho));
}

}  // namespace nibp
