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
#include <vector>

#include "nibp/circuit.hpp"
#include "nibp/pauli.hpp"

namespace nibp {

/// H = identity_coeff * I + sum_k coeff_k P_k with real coefficients, so H is
/// Hermitian by construction. Terms are merged by Pauli string and never hold
/// the identity.
class Hamiltonian {
 public:
  Hamiltonian(int num_qubits, const std::vector<PauliTerm>& terms, double identity_coeff = 0.0);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dimension(num_qubits_); }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  double identity_coeff() const { return identity_coeff_; }
  /// Largest Hamming weight carrying a nonzero coefficient.
  int locality() const;

  CMatrix matrix() const;
  /// Tr(H) / d.
  double trace_over_dim() const { return identity_coeff_; }
  /// sqrt(Tr H^2).
  double hs_norm() const;
  /// ||h|| = sqrt(d * sum_k coeff_k^2), without building a basis.
  double h_norm() const;
  /// max_j |h_j| over the traceless part.
  double h_max() const;

  Hamiltonian scaled(double factor) const;
  Hamiltonian shifted(double energy) const;

 private:
  int num_qubits_;
  std::vector<PauliTerm> terms_;
  double identity_coeff_;
};

/// Every string over {I, X, Z} of Hamming weight <= 2 gets a coefficient
/// uniform in [0, 1); the result is shifted so its ground energy is 0 and
/// scaled to unit Hilbert-Schmidt norm. Throws SizeError outside 2..9 qubits.
Hamiltonian random_two_local(int num_qubits, std::uint64_t seed);

/// Smallest eigenvalue of the dense matrix.
double ground_energy(const Hamiltonian& h);

struct HVector {
  /// Tr(F_0 H) = sqrt(d) * identity coefficient.
  double h0;
  /// h_j = Tr(F_j H), j >= 1.
  RVector h;
};

HVector h_vector(const Hamiltonian& h, const NiceBasis& basis);

/// h_max * n^{K/2} / sqrt((K-1)!). Throws PreconditionError unless
/// 1 <= K <= n.
double h_norm_bound(int num_qubits, int locality, double h_max);

/// Tr(H rho) through the Pauli terms. Throws NumericalError when the
/// imaginary part exceeds 1e-10.
double cost(const Hamiltonian& h, const CMatrix& rho);
inline double cost(const Hamiltonian& h, const DensityMatrix& rho) { return cost(h, rho.matrix()); }
/// Tr(H)/d + v . h.
double cost_from_coherence(const HVector& h, const RVector& v, int num_qubits);

}  // namespace nibp
