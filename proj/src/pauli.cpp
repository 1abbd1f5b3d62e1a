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

#include "nibp/pauli.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace nibp {

namespace {

std::uint32_t qubit_bit(int num_qubits, int qubit) {
  return std::uint32_t{1} << (num_qubits - 1 - qubit);
}

void check_qubits(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw SizeError("qubit count " + std::to_string(num_qubits) +
                    " outside [1, " + std::to_string(kMaxQubits) + "]");
  }
}

std::uint64_t key(const PauliString& p) {
  return (std::uint64_t{p.x_mask()} << 32) | p.z_mask();
}

// Lexicographic combinations of `weight` positions out of n.
void for_each_combination(int n, int weight,
                          const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pos(weight);
  for (int i = 0; i < weight; ++i) pos[i] = i;
  while (true) {
    fn(pos);
    int i = weight - 1;
    while (i >= 0 && pos[i] == n - weight + i) --i;
    if (i < 0) return;
    ++pos[i];
    for (int j = i + 1; j < weight; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace

char to_char(PauliLetter letter) {
  static constexpr char kChars[4] = {'I', 'X', 'Y', 'Z'};
  return kChars[static_cast<int>(letter)];
}

PauliString::PauliString(int num_qubits) : PauliString(num_qubits, 0, 0) {}

PauliString::PauliString(int num_qubits, std::uint32_t x_mask, std::uint32_t z_mask)
    : num_qubits_(num_qubits), x_(x_mask), z_(z_mask) {
  if (num_qubits < 1 || num_qubits > 31) {
    throw SizeError("Pauli string qubit count out of range");
  }
  const std::uint32_t limit = (std::uint32_t{1} << num_qubits) - 1;
  if ((x_mask | z_mask) & ~limit) {
    throw DimensionError("Pauli mask has bits beyond the qubit count");
  }
}

PauliString PauliString::parse(std::string_view letters) {
  PauliString p(static_cast<int>(letters.size()));
  for (std::size_t q = 0; q < letters.size(); ++q) {
    switch (letters[q]) {
      case 'I': break;
      case 'X': p.set_letter(static_cast<int>(q), PauliLetter::X); break;
      case 'Y': p.set_letter(static_cast<int>(q), PauliLetter::Y); break;
      case 'Z': p.set_letter(static_cast<int>(q), PauliLetter::Z); break;
      default:
        throw ConfigError("invalid Pauli letter '" + std::string(1, letters[q]) + "'");
    }
  }
  return p;
}

PauliString PauliString::single(int num_qubits, int qubit, PauliLetter letter) {
  PauliString p(num_qubits);
  p.set_letter(qubit, letter);
  return p;
}

PauliLetter PauliString::letter(int qubit) const {
  const std::uint32_t bit = qubit_bit(num_qubits_, qubit);
  const bool x = x_ & bit;
  const bool z = z_ & bit;
  if (x && z) return PauliLetter::Y;
  if (x) return PauliLetter::X;
  if (z) return PauliLetter::Z;
  return PauliLetter::I;
}

void PauliString::set_letter(int qubit, PauliLetter letter) {
  if (qubit < 0 || qubit >= num_qubits_) {
    throw DimensionError("qubit index out of range");
  }
  const std::uint32_t bit = qubit_bit(num_qubits_, qubit);
  x_ &= ~bit;
  z_ &= ~bit;
  if (letter == PauliLetter::X || letter == PauliLetter::Y) x_ |= bit;
  if (letter == PauliLetter::Z || letter == PauliLetter::Y) z_ |= bit;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int q = 0; q < num_qubits_; ++q) {
    if (letter(q) != PauliLetter::I) out.push_back(q);
  }
  return out;
}

std::string PauliString::str() const {
  std::string s(static_cast<std::size_t>(num_qubits_), 'I');
  for (int q = 0; q < num_qubits_; ++q) s[static_cast<std::size_t>(q)] = to_char(letter(q));
  return s;
}

CMatrix PauliString::matrix() const {
  const auto d = static_cast<Eigen::Index>(dim());
  CMatrix m = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    m(static_cast<Eigen::Index>(static_cast<std::size_t>(k) ^ x_), k) =
        column_phase(static_cast<std::size_t>(k));
  }
  return m;
}

NiceBasis::NiceBasis(int num_qubits, std::vector<PauliString> strings)
    : num_qubits_(num_qubits),
      scale_(1.0 / std::sqrt(static_cast<double>(dimension(num_qubits)))),
      strings_(std::move(strings)) {
  index_.reserve(strings_.size());
  for (std::size_t j = 0; j < strings_.size(); ++j) index_.emplace(key(strings_[j]), j);
}

CMatrix NiceBasis::element(std::size_t j) const { return scale_ * strings_.at(j).matrix(); }

std::size_t NiceBasis::index_of(const PauliString& p) const {
  if (p.num_qubits() != num_qubits_) {
    throw DimensionError("Pauli string and basis disagree on qubit count");
  }
  return index_.at(key(p));
}

NiceBasis build_nice_basis(int num_qubits) {
  check_qubits(num_qubits);
  constexpr PauliLetter kLetters[3] = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
  std::vector<PauliString> strings;
  strings.reserve(dimension(num_qubits) * dimension(num_qubits));
  strings.emplace_back(num_qubits);
  for (int w = 1; w <= num_qubits; ++w) {
    for_each_combination(num_qubits, w, [&](const std::vector<int>& pos) {
      std::size_t count = 1;
      for (int i = 0; i < w; ++i) count *= 3;
      for (std::size_t code = 0; code < count; ++code) {
        PauliString p(num_qubits);
        std::size_t rest = code;
        for (int i = w - 1; i >= 0; --i) {
          p.set_letter(pos[static_cast<std::size_t>(i)], kLetters[rest % 3]);
          rest /= 3;
        }
        strings.push_back(p);
      }
    });
  }
  return NiceBasis(num_qubits, std::move(strings));
}

double min_eigenvalue(const CMatrix& m) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix::DensityMatrix(int num_qubits, CMatrix data)
    : num_qubits_(num_qubits), data_(std::move(data)) {
  check_qubits(num_qubits);
  const auto d = static_cast<Eigen::Index>(dim());
  if (data_.rows() != d || data_.cols() != d) {
    throw DimensionError("density matrix is not " + std::to_string(d) + "x" +
                         std::to_string(d));
  }
  if (!data_.allFinite()) throw NumericalError("density matrix has non-finite entries");
  const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw InvalidStateError("density matrix not Hermitian (residual " +
                                std::to_string(herm) + ")",
                            min_eigenvalue(data_));
  }
  const double trace_err = std::abs(data_.trace() - Complex{1.0, 0.0});
  if (trace_err > kTraceTol) {
    throw InvalidStateError("density matrix trace deviates from 1 by " +
                                std::to_string(trace_err),
                            min_eigenvalue(data_));
  }
  const double lo = min_eigenvalue(data_);
  if (lo < kPositivityTol) {
    std::ostringstream msg;
    msg << "density matrix not positive (min eigenvalue " << lo << ")";
    throw InvalidStateError(msg.str(), lo);
  }
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, std::size_t index) {
  check_qubits(num_qubits);
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  if (index >= static_cast<std::size_t>(d)) throw DimensionError("basis index out of range");
  CMatrix m = CMatrix::Zero(d, d);
  m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return DensityMatrix(num_qubits, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  check_qubits(num_qubits);
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  return DensityMatrix(num_qubits, CMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::from_statevector(int num_qubits, const CVector& psi) {
  check_qubits(num_qubits);
  if (psi.size() != static_cast<Eigen::Index>(dimension(num_qubits))) {
    throw DimensionError("state vector length does not match qubit count");
  }
  const CVector unit = psi / psi.norm();
  return DensityMatrix(num_qubits, unit * unit.adjoint());
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return data_.squaredNorm();
}

CoherenceVector::CoherenceVector(int num_qubits, RVector v)
    : num_qubits_(num_qubits), v_(std::move(v)) {
  check_qubits(num_qubits);
  const auto d = dimension(num_qubits);
  if (static_cast<std::size_t>(v_.size()) != d * d - 1) {
    throw DimensionError("coherence vector length must be d^2 - 1");
  }
  if (v_.norm() > max_norm(num_qubits) + kNormTol) {
    throw PreconditionError("coherence vector norm exceeds sqrt(1 - 1/d)");
  }
}

double CoherenceVector::max_norm(int num_qubits) {
  return std::sqrt(1.0 - 1.0 / static_cast<double>(dimension(num_qubits)));
}

RVector coherence_coordinates(const CMatrix& op, const NiceBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  if (op.rows() != d || op.cols() != d) {
    throw DimensionError("operator dimension does not match basis");
  }
  RVector v(static_cast<Eigen::Index>(basis.size() - 1));
  for (std::size_t j = 1; j < basis.size(); ++j) {
    v(static_cast<Eigen::Index>(j - 1)) = basis.scale() * pauli_trace(basis.string(j), op).real();
  }
  return v;
}

CMatrix reconstruct_operator(const RVector& v, const NiceBasis& basis) {
  if (static_cast<std::size_t>(v.size()) != basis.size() - 1) {
    throw DimensionError("coherence vector length does not match basis");
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Identity(d, d) / static_cast<double>(d);
  for (std::size_t j = 1; j < basis.size(); ++j) {
    const double coeff = v(static_cast<Eigen::Index>(j - 1)) * basis.scale();
    if (coeff == 0.0) continue;
    const PauliString& p = basis.string(j);
    const std::size_t x = p.x_mask();
    for (Eigen::Index k = 0; k < d; ++k) {
      m(static_cast<Eigen::Index>(static_cast<std::size_t>(k) ^ x), k) +=
          coeff * p.column_phase(static_cast<std::size_t>(k));
    }
  }
  return m;
}

CoherenceVector to_coherence(const DensityMatrix& rho, const NiceBasis& basis) {
  if (rho.num_qubits() != basis.num_qubits()) {
    throw DimensionError("state and basis disagree on qubit count");
  }
  return CoherenceVector(rho.num_qubits(), coherence_coordinates(rho.matrix(), basis));
}

DensityMatrix from_coherence(const CoherenceVector& v, const NiceBasis& basis) {
  if (v.num_qubits() != basis.num_qubits()) {
    throw DimensionError("coherence vector and basis disagree on qubit count");
  }
  return DensityMatrix(v.num_qubits(), reconstruct_operator(v.values(), basis));
}

PurityCheck purity_identity_check(const DensityMatrix& rho, const NiceBasis& basis) {
  const double purity = rho.purity();
  const double norm = to_coherence(rho, basis).norm();
  const double excess = std::max(0.0, purity - 1.0 / static_cast<double>(rho.dim()));
  return {purity, norm, std::abs(norm - std::sqrt(excess))};
}

PurityCheck purity_identity_check(const DensityMatrix& rho) {
  return purity_identity_check(rho, build_nice_basis(rho.num_qubits()));
}

}  // namespace nibp
