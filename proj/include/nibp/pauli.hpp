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

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nibp/types.hpp"

namespace nibp {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliLetter letter);

/// Tensor product of single-qubit Paulis on n qubits, stored as X and Z bit
/// masks. Letter 0 of the string acts on qubit 0, which is the most
/// significant bit of a computational-basis index (|q0 q1 ... q_{n-1}>).
///
/// Column k of the matrix holds a single nonzero entry at row k ^ x_mask with
/// value i^{#Y} (-1)^{popcount(k & z_mask)}; every kernel below relies on it.
class PauliString {
 public:
  explicit PauliString(int num_qubits = 1);
  PauliString(int num_qubits, std::uint32_t x_mask, std::uint32_t z_mask);

  /// Parses a word over {I, X, Y, Z}; letter i acts on qubit i.
  static PauliString parse(std::string_view letters);
  static PauliString single(int num_qubits, int qubit, PauliLetter letter);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dimension(num_qubits_); }
  std::uint32_t x_mask() const { return x_; }
  std::uint32_t z_mask() const { return z_; }

  PauliLetter letter(int qubit) const;
  void set_letter(int qubit, PauliLetter letter);
  int hamming_weight() const { return std::popcount(x_ | z_); }
  bool is_identity() const { return (x_ | z_) == 0; }
  /// Qubits carrying a non-identity letter, ascending.
  std::vector<int> support() const;

  std::string str() const;

  /// Phase of the single nonzero entry in column `col`.
  Complex column_phase(std::size_t col) const {
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int sign = std::popcount(static_cast<std::uint32_t>(col) & z_) & 1;
    const Complex base = kIPow[std::popcount(x_ & z_) & 3];
    return sign ? -base : base;
  }

  CMatrix matrix() const;

  bool operator==(const PauliString& other) const = default;

 private:
  int num_qubits_;
  std::uint32_t x_;
  std::uint32_t z_;
};

/// P * m without materializing P.
template <typename Derived>
typename Derived::PlainObject pauli_left(const PauliString& p,
                                         const Eigen::MatrixBase<Derived>& m) {
  typename Derived::PlainObject out(m.rows(), m.cols());
  const std::size_t x = p.x_mask();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const std::size_t src = static_cast<std::size_t>(r) ^ x;
    out.row(r) = p.column_phase(src) * m.row(static_cast<Eigen::Index>(src));
  }
  return out;
}

/// m * P without materializing P.
template <typename Derived>
typename Derived::PlainObject pauli_right(const Eigen::MatrixBase<Derived>& m,
                                          const PauliString& p) {
  typename Derived::PlainObject out(m.rows(), m.cols());
  const std::size_t x = p.x_mask();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const std::size_t src = static_cast<std::size_t>(c) ^ x;
    out.col(c) = p.column_phase(static_cast<std::size_t>(c)) *
                 m.col(static_cast<Eigen::Index>(src));
  }
  return out;
}

/// Tr(P m) in O(d).
template <typename Derived>
Complex pauli_trace(const PauliString& p, const Eigen::MatrixBase<Derived>& m) {
  Complex acc{0.0, 0.0};
  const std::size_t x = p.x_mask();
  for (Eigen::Index b = 0; b < m.cols(); ++b) {
    const std::size_t k = static_cast<std::size_t>(b) ^ x;
    acc += p.column_phase(k) * m(static_cast<Eigen::Index>(k), b);
  }
  return acc;
}

/// exp(-i theta P / 2) rho exp(+i theta P / 2).
template <typename Derived>
typename Derived::PlainObject pauli_rotate(const PauliString& p, double theta,
                                           const Eigen::MatrixBase<Derived>& rho) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const auto p_rho = pauli_left(p, rho);
  const auto rho_p = pauli_right(rho, p);
  const auto p_rho_p = pauli_right(p_rho, p);
  const Complex ics{0.0, c * s};
  return (c * c) * rho.derived() + ics * (rho_p - p_rho) + (s * s) * p_rho_p;
}

/// Normalized Pauli strings F_j = P_j / sqrt(d), ordered by Hamming weight and
/// then lexicographically by (qubit positions, letters with X < Y < Z).
/// Index 0 is the scaled identity. Matrices are built on demand.
class NiceBasis {
 public:
  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dimension(num_qubits_); }
  /// d^2 including the identity.
  std::size_t size() const { return strings_.size(); }
  const PauliString& string(std::size_t j) const { return strings_[j]; }
  const std::vector<PauliString>& strings() const { return strings_; }
  double scale() const { return scale_; }

  CMatrix element(std::size_t j) const;
  /// Position of `p`; throws DimensionError on qubit-count mismatch.
  std::size_t index_of(const PauliString& p) const;

 private:
  friend NiceBasis build_nice_basis(int num_qubits);
  NiceBasis(int num_qubits, std::vector<PauliString> strings);

  int num_qubits_;
  double scale_;
  std::vector<PauliString> strings_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Throws SizeError unless 1 <= n <= 9.
NiceBasis build_nice_basis(int num_qubits);

/// Smallest eigenvalue of the Hermitian part of `m`.
double min_eigenvalue(const CMatrix& m);

/// Validated density operator: Hermitian and unit trace within 1e-10,
/// spectrum bounded below by -1e-9.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = -1e-9;

  DensityMatrix(int num_qubits, CMatrix data);

  static DensityMatrix basis_state(int num_qubits, std::size_t index);
  static DensityMatrix maximally_mixed(int num_qubits);
  static DensityMatrix from_statevector(int num_qubits, const CVector& psi);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dimension(num_qubits_); }
  const CMatrix& matrix() const { return data_; }
  double purity() const;

 private:
  int num_qubits_;
  CMatrix data_;
};

/// Real coordinates of rho - I/d in a nice basis.
class CoherenceVector {
 public:
  static constexpr double kNormTol = 1e-9;

  /// Throws PreconditionError when ||v|| exceeds sqrt(1 - 1/d).
  CoherenceVector(int num_qubits, RVector v);

  int num_qubits() const { return num_qubits_; }
  const RVector& values() const { return v_; }
  double norm() const { return v_.norm(); }
  static double max_norm(int num_qubits);

 private:
  int num_qubits_;
  RVector v_;
};

/// v_j = Tr(F_j rho), j >= 1. Accepts any operator; the imaginary part is
/// dropped, so callers pass Hermitian input.
RVector coherence_coordinates(const CMatrix& op, const NiceBasis& basis);
/// I/d + sum_j v_j F_j without validation.
CMatrix reconstruct_operator(const RVector& v, const NiceBasis& basis);

CoherenceVector to_coherence(const DensityMatrix& rho, const NiceBasis& basis);
/// Throws InvalidStateError (carrying the minimum eigenvalue) when the
/// reconstruction is not positive within tolerance.
DensityMatrix from_coherence(const CoherenceVector& v, const NiceBasis& basis);

struct PurityCheck {
  double purity;
  double coherence_norm;
  /// | ||v|| - sqrt(Tr rho^2 - 1/d) |
  double residual;
};

PurityCheck purity_identity_check(const DensityMatrix& rho);
PurityCheck purity_identity_check(const DensityMatrix& rho, const NiceBasis& basis);

}  // namespace nibp
