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

#include <compare>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nibp/channel.hpp"
#include "nibp/pauli.hpp"

namespace nibp {

/// (layer, slot) position of a gate; slots count from 0 within a layer.
struct GateLocation {
  int layer = 0;
  int slot = 0;
  auto operator<=>(const GateLocation&) const = default;
};

std::string to_string(const GateLocation& loc);

/// a * P, one term of a Pauli expansion.
struct PauliTerm {
  PauliString pauli;
  double coeff = 0.0;
};

enum class GateKind { kRotation, kFixed };

/// A rotation exp(-i theta G / 2) with G = P + A, or a fixed unitary acting on
/// a few qubits. For rotations G is P alone unless the gate was produced by
/// perturbed_gate. local_unitary() acts on targets() with targets()[0] as the
/// most significant local bit.
class Gate {
 public:
  static Gate rotation(const PauliString& generator);
  /// Throws PreconditionError unless `local` is unitary within 1e-10.
  static Gate fixed(int num_qubits, CMatrix local, std::vector<int> targets, std::string label);

  GateKind kind() const { return kind_; }
  bool parameterized() const { return kind_ == GateKind::kRotation; }
  int num_qubits() const { return num_qubits_; }
  /// Intended generator P; identity string for fixed gates.
  const PauliString& generator() const { return generator_; }
  /// Control-noise terms A = sum_k a_k P_k; empty for ideal gates.
  const std::vector<PauliTerm>& perturbation() const { return perturbation_; }
  bool perturbed() const { return !perturbation_.empty(); }
  const std::vector<int>& targets() const { return targets_; }
  const std::string& label() const { return label_; }

  CMatrix local_unitary(double theta = 0.0) const;
  /// Full 2^n x 2^n unitary; intended for oracles and small n.
  CMatrix unitary(double theta = 0.0) const;
  /// U rho U^dagger.
  CMatrix apply(const CMatrix& rho, double theta = 0.0) const;

 private:
  friend Gate perturbed_gate(const Gate& g, const std::vector<PauliTerm>& a);
  Gate() = default;

  struct Spectrum {
    RVector eigenvalues;
    CMatrix eigenvectors;
  };

  GateKind kind_ = GateKind::kFixed;
  int num_qubits_ = 1;
  PauliString generator_;
  std::vector<PauliTerm> perturbation_;
  std::vector<int> targets_;
  CMatrix matrix_;
  std::string label_;
  std::shared_ptr<const Spectrum> spectrum_;
};

/// Largest ||A|| accepted by perturbed_gate.
inline constexpr double kMaxPerturbationNorm = 0.2;

/// Operator norm of sum_k a_k P_k.
double perturbation_norm(const std::vector<PauliTerm>& a);

/// Replaces the generator P by P + sum_k a_k P_k. Throws PreconditionError for
/// fixed gates or when the perturbation norm reaches kMaxPerturbationNorm.
Gate perturbed_gate(const Gate& g, const std::vector<PauliTerm>& a);

/// Layered circuit. Gates are appended to the most recent layer; every
/// rotation receives the next flat parameter index.
class Circuit {
 public:
  explicit Circuit(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  std::size_t num_parameters() const { return parameters_.size(); }

  Circuit& add_layer();
  GateLocation add_gate(Gate g);
  GateLocation add_rotation(const PauliString& generator);
  GateLocation add_rotation(int qubit, PauliLetter letter);
  GateLocation add_cnot(int control, int target);

  const std::vector<std::vector<Gate>>& layers() const { return layers_; }
  const std::vector<Gate>& layer(int l) const;
  const Gate& gate(const GateLocation& loc) const;
  /// Flat index of a rotation; PreconditionError for fixed gates.
  std::size_t parameter_index(const GateLocation& loc) const;
  const GateLocation& parameter_location(std::size_t index) const;
  /// Total CNOT-labelled gates.
  std::size_t count_gates(const std::string& label) const;

 private:
  int num_qubits_;
  std::vector<std::vector<Gate>> layers_;
  std::vector<std::vector<int>> param_of_slot_;
  std::vector<GateLocation> parameters_;
};

/// Each layer: RY on every qubit, then CNOT(i, i+1) for i = 0..n-2.
/// Parameter l*n + q is the RY on qubit q in layer l.
Circuit build_two_local(int num_qubits, int num_layers);

/// Kraus channel acting on a subset of qubits.
struct LocalChannel {
  KrausChannel channel;
  std::vector<int> targets;
};

using LayerNoise = std::vector<LocalChannel>;

/// p_k and P_k of a random-unitary gate; branch `intended` carries the ideal
/// generator.
struct UnitaryMixture {
  struct Branch {
    double probability;
    PauliString pauli;
  };
  std::vector<Branch> branches;
  std::size_t intended = 0;
};

/// Throws PreconditionError unless the probabilities are non-negative, sum to
/// one within 1e-12 and the intended branch carries at least half the weight.
void validate_mixture(const UnitaryMixture& mixture);

/// Kraus operators sqrt(p_k) exp(-i theta P_k / 2) on the full register.
KrausChannel random_unitary_channel(const UnitaryMixture& mixture, double theta);

/// Gate-level and layer-level noise. Layers without an explicit entry use the
/// default layer noise.
class NoiseSpec {
 public:
  NoiseSpec() = default;

  static NoiseSpec noiseless() { return {}; }
  /// `single_qubit` applied to every qubit after every layer.
  static NoiseSpec broadcast(const KrausChannel& single_qubit, int num_qubits);

  void set_default_layer(LayerNoise noise) { default_layer_ = std::move(noise); }
  void set_layer(int layer, LayerNoise noise) { layers_[layer] = std::move(noise); }
  const LayerNoise& layer(int layer) const;

  void set_control(const GateLocation& loc, std::vector<PauliTerm> a);
  void set_mixture(const GateLocation& loc, UnitaryMixture mixture);
  /// Removes control and random-unitary noise at `loc`.
  void clear_gate_noise(const GateLocation& loc) {
    control_.erase(loc);
    mixture_.erase(loc);
  }
  const std::vector<PauliTerm>* control(const GateLocation& loc) const;
  const UnitaryMixture* mixture(const GateLocation& loc) const;
  bool has_gate_noise() const { return !control_.empty() || !mixture_.empty(); }

  /// Whether every layer channel used by the first `num_layers` layers is
  /// unital. Gate-level noise is always unital.
  bool unital(int num_layers) const;

 private:
  LayerNoise default_layer_;
  std::map<int, LayerNoise> layers_;
  std::map<GateLocation, std::vector<PauliTerm>> control_;
  std::map<GateLocation, UnitaryMixture> mixture_;
};

/// One copy of `single_qubit` per qubit.
LayerNoise broadcast_layer(const KrausChannel& single_qubit, int num_qubits);

/// Random control-noise coefficients: `terms` distinct 1- or 2-local strings,
/// each with a coefficient uniform in [-a_max, a_max].
std::vector<PauliTerm> random_control_noise(int num_qubits, Rng& rng, double a_max = 0.05,
                                            int terms = 3);

/// Gate at `loc` with its gate-level noise.
CMatrix apply_noisy_gate(const Circuit& circ, const GateLocation& loc, double theta,
                         const NoiseSpec& noise, const CMatrix& rho);
/// Layer channel of layer l.
CMatrix apply_layer_noise(const Circuit& circ, int layer, const NoiseSpec& noise,
                          const CMatrix& rho);

/// State immediately before the gate at `loc`.
CMatrix evolve_prefix(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                      const CMatrix& rho0, const GateLocation& loc);
/// Continues from the state immediately after the gate at `loc` to the end.
CMatrix evolve_suffix(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                      const CMatrix& rho, const GateLocation& loc);

/// Unvalidated evolution; the hot path for gradients and training.
CMatrix evolve_matrix(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                      const CMatrix& rho0);
/// Full evolution; the result is validated as a density matrix.
DensityMatrix evolve(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                     const DensityMatrix& rho0);
/// States after each layer; element 0 is rho0.
std::vector<CMatrix> trajectory(const Circuit& circ, const RVector& theta,
                                const NoiseSpec& noise, const CMatrix& rho0);
/// The CPTP map of one layer (noisy gates, then the layer channel).
LinearMap layer_map(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                    int layer);

/// |0...0><0...0|.
DensityMatrix zero_state(int num_qubits);

}  // namespace nibp
