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

#include "nibp/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "nibp/random.hpp"

namespace nibp {

namespace {

constexpr double kImagTol = 1e-10;

}  // namespace

Hamiltonian::Hamiltonian(int num_qubits, const std::vector<PauliTerm>& terms, double identity_coeff)
    : num_qubits_(num_qubits), identity_coeff_(identity_coeff) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) throw SizeError("Hamiltonian qubit count out of range");
  std::map<std::tuple<int, std::uint32_t, std::uint32_t>, PauliTerm> merged;
  for (const PauliTerm& t : terms) {
    if (t.pauli.num_qubits() != num_qubits) throw DimensionError("term qubit count differs from Hamiltonian");
    if (!std::isfinite(t.coeff)) throw NumericalError("non-finite Hamiltonian coefficient");
    if (t.pauli.is_identity()) {
      identity_coeff_ += t.coeff;
      continue;
    }
    const auto key = std::make_tuple(t.pauli.hamming_weight(), t.pauli.x_mask(), t.pauli.z_mask());
    auto [it, inserted] = merged.emplace(key, t);
    if (!inserted) it->second.coeff += t.coeff;
  }
  for (auto& [key, t] : merged) {
    if (t.coeff != 0.0) terms_.push_back(t);
  }
}

int Hamiltonian::locality() const {
  int k = 0;
  for (const PauliTerm& t : terms_) k = std::max(k, t.pauli.hamming_weight());
  return k;
}

CMatrix Hamiltonian::matrix() const {
  const auto d = static_cast<Eigen::Index>(dim());
  CMatrix out = identity_coeff_ * CMatrix::Identity(d, d);
  for (const PauliTerm& t : terms_) {
    const std::size_t x = t.pauli.x_mask();
    for (std::size_t k = 0; k < dim(); ++k) {
      out(static_cast<Eigen::Index>(k ^ x), static_cast<Eigen::Index>(k)) += t.coeff * t.pauli.column_phase(k);
    }
  }
  return out;
}

double Hamiltonian::hs_norm() const {
  const double h0 = identity_coeff_ * std::sqrt(static_cast<double>(dim()));
  return std::sqrt(h0 * h0 + h_norm() * h_norm());
}

double Hamiltonian::h_norm() const {
  double s = 0.0;
  for (const PauliTerm& t : terms_) s += t.coeff * t.coeff;
  return std::sqrt(static_cast<double>(dim()) * s);
}

double Hamiltonian::h_max() const {
  double m = 0.0;
  for (const PauliTerm& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m * std::sqrt(static_cast<double>(dim()));
}

Hamiltonian Hamiltonian::scaled(double factor) const {
  std::vector<PauliTerm> t = terms_;
  for (PauliTerm& term : t) term.coeff *= factor;
  return Hamiltonian(num_qubits_, t, identity_coeff_ * factor);
}

Hamiltonian Hamiltonian::shifted(double energy) const {
  return Hamiltonian(num_qubits_, terms_, identity_coeff_ + energy);
}

double ground_energy(const Hamiltonian& h) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h.matrix(), Eigen::EigenvaluesOnly).eigenvalues()(0);
}

Hamiltonian random_two_local(int num_qubits, std::uint64_t seed) {
  if (num_qubits < 2 || num_qubits > kMaxQubits) throw SizeError("random_two_local needs 2..9 qubits");
  Rng rng = make_rng(seed);
  constexpr PauliLetter kLetters[2] = {PauliLetter::X, PauliLetter::Z};
  std::vector<PauliTerm> terms;
  terms.push_back({PauliString(num_qubits), uniform(rng, 0.0, 1.0)});
  for (int q = 0; q < num_qubits; ++q) {
    for (PauliLetter a : kLetters) {
      terms.push_back({PauliString::single(num_qubits, q, a), uniform(rng, 0.0, 1.0)});
    }
  }
  for (int q = 0; q < num_qubits; ++q) {
    for (int r = q + 1; r < num_qubits; ++r) {
      for (PauliLetter a : kLetters) {
        for (PauliLetter b : kLetters) {
          PauliString p(num_qubits);
          p.set_letter(q, a);
          p.set_letter(r, b);
          terms.push_back({p, uniform(rng, 0.0, 1.0)});
        }
      }
    }
  }
  Hamiltonian h(num_qubits, terms);
  h = h.scaled(1.0 / h.hs_norm());
  h = h.shifted(-ground_energy(h));
  return h.scaled(1.0 / h.hs_norm());
}

HVector h_vector(const Hamiltonian& h, const NiceBasis& basis) {
  if (basis.num_qubits() != h.num_qubits()) throw DimensionError("basis and Hamiltonian disagree on n");
  const double sqrt_d = std::sqrt(static_cast<double>(h.dim()));
  HVector out{h.identity_coeff() * sqrt_d, RVector::Zero(static_cast<Eigen::Index>(basis.size() - 1))};
  for (const PauliTerm& t : h.terms()) {
    out.h(static_cast<Eigen::Index>(basis.index_of(t.pauli) - 1)) += t.coeff * sqrt_d;
  }
  return out;
}

double h_norm_bound(int num_qubits, int locality, double h_max) {
  if (locality < 1 || locality > num_qubits) {
    throw PreconditionError("locality must lie in [1, n]");
  }
  return h_max * std::pow(static_cast<double>(num_qubits), locality / 2.0) /
         std::sqrt(std::tgamma(static_cast<double>(locality)));
}

double cost(const Hamiltonian& h, const CMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(h.dim());
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("state dimension differs from Hamiltonian");
  Complex acc = h.identity_coeff() * rho.trace();
  for (const PauliTerm& t : h.terms()) acc += t.coeff * pauli_trace(t.pauli, rho);
  if (std::abs(acc.imag()) > kImagTol) throw NumericalError("Tr(H rho) has a non-negligible imaginary part");
  return acc.real();
}

double cost_from_coherence(const HVector& h, const RVector& v, int num_qubits) {
  if (v.size() != h.h.size()) throw DimensionError("coherence vector length differs from h");
  return h.h0 / std::sqrt(static_cast<double>(dimension(num_qubits))) + v.dot(h.h);
}

}  // namespace nibp
