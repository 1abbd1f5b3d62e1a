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

#include "nibp/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nibp/kernels.hpp"

namespace nibp {

namespace {

constexpr double kUnitaryTol = 1e-10;

PauliString restrict_to(const PauliString& p, const std::vector<int>& targets) {
  PauliString local(static_cast<int>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    local.set_letter(static_cast<int>(i), p.letter(targets[i]));
  }
  return local;
}

std::vector<int> union_support(const PauliString& generator, const std::vector<PauliTerm>& a) {
  std::uint32_t mask = generator.x_mask() | generator.z_mask();
  for (const PauliTerm& t : a) {
    if (t.pauli.num_qubits() != generator.num_qubits()) {
      throw DimensionError("perturbation term has the wrong qubit count");
    }
    if (t.coeff != 0.0) mask |= t.pauli.x_mask() | t.pauli.z_mask();
  }
  // Bit (n-1-q) marks qubit q.
  std::vector<int> out;
  const int n = generator.num_qubits();
  for (int q = 0; q < n; ++q) {
    if ((mask >> (n - 1 - q)) & 1u) out.push_back(q);
  }
  return out;
}

CMatrix local_sum(const std::vector<PauliTerm>& terms, const std::vector<int>& support) {
  const auto k = static_cast<Eigen::Index>(dimension(static_cast<int>(support.size())));
  CMatrix out = CMatrix::Zero(k, k);
  for (const PauliTerm& t : terms) {
    if (t.coeff != 0.0) out += t.coeff * restrict_to(t.pauli, support).matrix();
  }
  return out;
}

double theta_of(const Circuit& circ, const GateLocation& loc, const RVector& theta) {
  const Gate& g = circ.gate(loc);
  return g.parameterized() ? theta(static_cast<Eigen::Index>(circ.parameter_index(loc))) : 0.0;
}

void check_theta(const Circuit& circ, const RVector& theta) {
  if (static_cast<std::size_t>(theta.size()) != circ.num_parameters()) {
    throw DimensionError("expected " + std::to_string(circ.num_parameters()) +
                         " parameters, got " + std::to_string(theta.size()));
  }
}

void check_state(const Circuit& circ, const CMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(dimension(circ.num_qubits()));
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("state dimension mismatch");
}

CMatrix run_layer_range(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                        CMatrix rho, int layer, int first_slot, bool with_noise) {
  const auto& gates = circ.layer(layer);
  for (int m = first_slot; m < static_cast<int>(gates.size()); ++m) {
    const GateLocation loc{layer, m};
    rho = apply_noisy_gate(circ, loc, theta_of(circ, loc, theta), noise, rho);
  }
  if (with_noise) rho = apply_layer_noise(circ, layer, noise, rho);
  return rho;
}

}  // namespace

std::string to_string(const GateLocation& loc) {
  return "(" + std::to_string(loc.layer) + ", " + std::to_string(loc.slot) + ")";
}

Gate Gate::rotation(const PauliString& generator) {
  if (generator.is_identity()) throw PreconditionError("rotation generator must not be the identity");
  Gate g;
  g.kind_ = GateKind::kRotation;
  g.num_qubits_ = generator.num_qubits();
  g.generator_ = generator;
  g.targets_ = generator.support();
  g.label_ = "r" + generator.str();
  return g;
}

Gate Gate::fixed(int num_qubits, CMatrix local, std::vector<int> targets, std::string label) {
  detail::check_targets(targets, num_qubits, local.rows());
  if (local.rows() != local.cols()) throw DimensionError("fixed gate matrix must be square");
  const CMatrix residual = local.adjoint() * local - CMatrix::Identity(local.rows(), local.cols());
  if (residual.cwiseAbs().maxCoeff() > kUnitaryTol) {
    throw PreconditionError("fixed gate '" + label + "' is not unitary");
  }
  Gate g;
  g.kind_ = GateKind::kFixed;
  g.num_qubits_ = num_qubits;
  g.generator_ = PauliString(num_qubits);
  g.targets_ = std::move(targets);
  g.matrix_ = std::move(local);
  g.label_ = std::move(label);
  return g;
}

CMatrix Gate::local_unitary(double theta) const {
  if (kind_ == GateKind::kFixed) return matrix_;
  if (spectrum_) {
    const CVector phases = (spectrum_->eigenvalues.cast<Complex>() * Complex(0.0, -theta / 2.0))
                               .array()
                               .exp()
                               .matrix();
    return spectrum_->eigenvectors * phases.asDiagonal() * spectrum_->eigenvectors.adjoint();
  }
  const PauliString local = restrict_to(generator_, targets_);
  const auto k = static_cast<Eigen::Index>(local.dim());
  return std::cos(theta / 2.0) * CMatrix::Identity(k, k) -
         Complex(0.0, std::sin(theta / 2.0)) * local.matrix();
}

CMatrix Gate::unitary(double theta) const {
  return embed_operator(local_unitary(theta), targets_, num_qubits_);
}

CMatrix Gate::apply(const CMatrix& rho, double theta) const {
  if (kind_ == GateKind::kRotation && !spectrum_) return pauli_rotate(generator_, theta, rho);
  return conjugate_local(local_unitary(theta), targets_, num_qubits_, rho);
}

double perturbation_norm(const std::vector<PauliTerm>& a) {
  if (a.empty()) return 0.0;
  const std::vector<int> support = union_support(PauliString(a.front().pauli.num_qubits()), a);
  if (support.empty()) {
    double s = 0.0;
    for (const PauliTerm& t : a) s += t.coeff;
    return std::abs(s);
  }
  const CMatrix m = local_sum(a, support);
  return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

Gate perturbed_gate(const Gate& g, const std::vector<PauliTerm>& a) {
  if (!g.parameterized()) throw PreconditionError("control noise applies to rotation gates only");
  if (g.perturbed()) throw PreconditionError("gate is already perturbed");
  const double norm = perturbation_norm(a);
  if (!(norm < kMaxPerturbationNorm)) {
    throw PreconditionError("control-noise norm " + std::to_string(norm) + " is not below " +
                            std::to_string(kMaxPerturbationNorm));
  }
  const bool trivial = std::all_of(a.begin(), a.end(), [](const PauliTerm& t) { return t.coeff == 0.0; });
  if (trivial) return g;

  Gate out = g;
  out.perturbation_ = a;
  out.targets_ = union_support(g.generator(), a);
  std::vector<PauliTerm> all = a;
  all.push_back({g.generator(), 1.0});
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(local_sum(all, out.targets_));
  out.spectrum_ = std::make_shared<const Gate::Spectrum>(Gate::Spectrum{eig.eigenvalues(), eig.eigenvectors()});
  out.label_ = g.label() + "'";
  return out;
}

Circuit::Circuit(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw SizeError("circuit qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
}

Circuit& Circuit::add_layer() {
  layers_.emplace_back();
  param_of_slot_.emplace_back();
  return *this;
}

GateLocation Circuit::add_gate(Gate g) {
  if (g.num_qubits() != num_qubits_) throw DimensionError("gate qubit count differs from circuit");
  if (layers_.empty()) add_layer();
  const GateLocation loc{num_layers() - 1, static_cast<int>(layers_.back().size())};
  if (g.parameterized()) {
    param_of_slot_.back().push_back(static_cast<int>(parameters_.size()));
    parameters_.push_back(loc);
  } else {
    param_of_slot_.back().push_back(-1);
  }
  layers_.back().push_back(std::move(g));
  return loc;
}

GateLocation Circuit::add_rotation(const PauliString& generator) {
  return add_gate(Gate::rotation(generator));
}

GateLocation Circuit::add_rotation(int qubit, PauliLetter letter) {
  return add_rotation(PauliString::single(num_qubits_, qubit, letter));
}

GateLocation Circuit::add_cnot(int control, int target) {
  CMatrix cx = CMatrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  return add_gate(Gate::fixed(num_qubits_, cx, {control, target}, "cnot"));
}

const std::vector<Gate>& Circuit::layer(int l) const {
  if (l < 0 || l >= num_layers()) throw PreconditionError("layer index out of range");
  return layers_[static_cast<std::size_t>(l)];
}

const Gate& Circuit::gate(const GateLocation& loc) const {
  const auto& gates = layer(loc.layer);
  if (loc.slot < 0 || loc.slot >= static_cast<int>(gates.size())) {
    throw PreconditionError("no gate at " + to_string(loc));
  }
  return gates[static_cast<std::size_t>(loc.slot)];
}

std::size_t Circuit::parameter_index(const GateLocation& loc) const {
  gate(loc);
  const int idx = param_of_slot_[static_cast<std::size_t>(loc.layer)][static_cast<std::size_t>(loc.slot)];
  if (idx < 0) throw PreconditionError("gate at " + to_string(loc) + " is not parameterized");
  return static_cast<std::size_t>(idx);
}

const GateLocation& Circuit::parameter_location(std::size_t index) const {
  if (index >= parameters_.size()) throw PreconditionError("parameter index out of range");
  return parameters_[index];
}

std::size_t Circuit::count_gates(const std::string& label) const {
  std::size_t count = 0;
  for (const auto& layer : layers_) {
    for (const Gate& g : layer) count += g.label() == label ? 1 : 0;
  }
  return count;
}

Circuit build_two_local(int num_qubits, int num_layers) {
  if (num_qubits < 2) throw PreconditionError("two-local ansatz needs at least 2 qubits");
  if (num_layers < 1) throw PreconditionError("two-local ansatz needs at least 1 layer");
  Circuit circ(num_qubits);
  for (int l = 0; l < num_layers; ++l) {
    circ.add_layer();
    for (int q = 0; q < num_qubits; ++q) circ.add_rotation(q, PauliLetter::Y);
    for (int q = 0; q + 1 < num_qubits; ++q) circ.add_cnot(q, q + 1);
  }
  return circ;
}

void validate_mixture(const UnitaryMixture& mixture) {
  if (mixture.branches.empty()) throw PreconditionError("unitary mixture has no branches");
  if (mixture.intended >= mixture.branches.size()) {
    throw PreconditionError("intended branch index out of range");
  }
  double total = 0.0;
  for (const auto& b : mixture.branches) {
    if (!(b.probability >= 0.0)) throw PreconditionError("mixture probabilities must be non-negative");
    total += b.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("mixture probabilities must sum to 1");
  if (mixture.branches[mixture.intended].probability < 0.5) {
    throw PreconditionError("intended branch must carry the dominant weight");
  }
}

KrausChannel random_unitary_channel(const UnitaryMixture& mixture, double theta) {
  validate_mixture(mixture);
  std::vector<CMatrix> ops;
  for (const auto& b : mixture.branches) {
    const auto d = static_cast<Eigen::Index>(b.pauli.dim());
    const CMatrix u = std::cos(theta / 2.0) * CMatrix::Identity(d, d) -
                      Complex(0.0, std::sin(theta / 2.0)) * b.pauli.matrix();
    ops.push_back(std::sqrt(b.probability) * u);
  }
  return KrausChannel(std::move(ops));
}

LayerNoise broadcast_layer(const KrausChannel& single_qubit, int num_qubits) {
  if (single_qubit.num_qubits() != 1) throw DimensionError("broadcast needs a single-qubit channel");
  LayerNoise out;
  for (int q = 0; q < num_qubits; ++q) out.push_back({single_qubit, {q}});
  return out;
}

NoiseSpec NoiseSpec::broadcast(const KrausChannel& single_qubit, int num_qubits) {
  NoiseSpec spec;
  spec.set_default_layer(broadcast_layer(single_qubit, num_qubits));
  return spec;
}

const LayerNoise& NoiseSpec::layer(int layer) const {
  const auto it = layers_.find(layer);
  return it == layers_.end() ? default_layer_ : it->second;
}

void NoiseSpec::set_control(const GateLocation& loc, std::vector<PauliTerm> a) {
  if (mixture_.count(loc)) throw PreconditionError("gate already carries random-unitary noise");
  const double norm = perturbation_norm(a);
  if (!(norm < kMaxPerturbationNorm)) throw PreconditionError("control-noise norm guard exceeded");
  control_[loc] = std::move(a);
}

void NoiseSpec::set_mixture(const GateLocation& loc, UnitaryMixture mixture) {
  if (control_.count(loc)) throw PreconditionError("gate already carries control noise");
  validate_mixture(mixture);
  mixture_[loc] = std::move(mixture);
}

const std::vector<PauliTerm>* NoiseSpec::control(const GateLocation& loc) const {
  const auto it = control_.find(loc);
  return it == control_.end() ? nullptr : &it->second;
}

const UnitaryMixture* NoiseSpec::mixture(const GateLocation& loc) const {
  const auto it = mixture_.find(loc);
  return it == mixture_.end() ? nullptr : &it->second;
}

bool NoiseSpec::unital(int num_layers) const {
  for (int l = 0; l < num_layers; ++l) {
    for (const LocalChannel& ch : layer(l)) {
      if (!validate_kraus(ch.channel).unital) return false;
    }
  }
  return true;
}

std::vector<PauliTerm> random_control_noise(int num_qubits, Rng& rng, double a_max, int terms) {
  std::vector<PauliString> pool;
  constexpr PauliLetter kLetters[3] = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
  for (int q = 0; q < num_qubits; ++q) {
    for (PauliLetter a : kLetters) pool.push_back(PauliString::single(num_qubits, q, a));
  }
  for (int q = 0; q < num_qubits; ++q) {
    for (int r = q + 1; r < num_qubits; ++r) {
      for (PauliLetter a : kLetters) {
        for (PauliLetter b : kLetters) {
          PauliString p(num_qubits);
          p.set_letter(q, a);
          p.set_letter(r, b);
          pool.push_back(p);
        }
      }
    }
  }
  if (terms < 0 || static_cast<std::size_t>(terms) > pool.size()) {
    throw PreconditionError("requested more control-noise terms than 1- and 2-local strings");
  }
  std::vector<PauliTerm> out;
  for (int t = 0; t < terms; ++t) {
    const std::size_t remaining = pool.size() - static_cast<std::size_t>(t);
    const auto pick = static_cast<std::size_t>(t) + static_cast<std::size_t>(rng() % remaining);
    std::swap(pool[static_cast<std::size_t>(t)], pool[pick]);
    out.push_back({pool[static_cast<std::size_t>(t)], uniform(rng, -a_max, a_max)});
  }
  return out;
}

CMatrix apply_noisy_gate(const Circuit& circ, const GateLocation& loc, double theta,
                         const NoiseSpec& noise, const CMatrix& rho) {
  const Gate& g = circ.gate(loc);
  if (const UnitaryMixture* mix = noise.mixture(loc)) {
    if (!g.parameterized()) throw PreconditionError("random-unitary noise on a fixed gate");
    if (!(mix->branches[mix->intended].pauli == g.generator())) {
      throw PreconditionError("intended mixture branch differs from the gate generator");
    }
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& b : mix->branches) {
      if (b.probability != 0.0) out += b.probability * pauli_rotate(b.pauli, theta, rho);
    }
    return out;
  }
  if (const std::vector<PauliTerm>* a = noise.control(loc)) {
    return perturbed_gate(g, *a).apply(rho, theta);
  }
  return g.apply(rho, theta);
}

CMatrix apply_layer_noise(const Circuit& circ, int layer, const NoiseSpec& noise,
                          const CMatrix& rho) {
  CMatrix out = rho;
  for (const LocalChannel& ch : noise.layer(layer)) {
    out = apply_kraus_local(ch.channel.kraus_ops(), ch.targets, circ.num_qubits(), out);
  }
  return out;
}

CMatrix evolve_prefix(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                      const CMatrix& rho0, const GateLocation& loc) {
  check_theta(circ, theta);
  check_state(circ, rho0);
  circ.gate(loc);
  CMatrix rho = rho0;
  for (int l = 0; l < loc.layer; ++l) rho = run_layer_range(circ, theta, noise, rho, l, 0, true);
  for (int m = 0; m < loc.slot; ++m) {
    const GateLocation here{loc.layer, m};
    rho = apply_noisy_gate(circ, here, theta_of(circ, here, theta), noise, rho);
  }
  return rho;
}

CMatrix evolve_suffix(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                      const CMatrix& rho, const GateLocation& loc) {
  check_theta(circ, theta);
  check_state(circ, rho);
  circ.gate(loc);
  CMatrix out = run_layer_range(circ, theta, noise, rho, loc.layer, loc.slot + 1, true);
  for (int l = loc.layer + 1; l < circ.num_layers(); ++l) {
    out = run_layer_range(circ, theta, noise, out, l, 0, true);
  }
  return out;
}

CMatrix evolve_matrix(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                      const CMatrix& rho0) {
  check_theta(circ, theta);
  check_state(circ, rho0);
  CMatrix rho = rho0;
  for (int l = 0; l < circ.num_layers(); ++l) rho = run_layer_range(circ, theta, noise, rho, l, 0, true);
  return rho;
}

DensityMatrix evolve(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                     const DensityMatrix& rho0) {
  if (rho0.num_qubits() != circ.num_qubits()) throw DimensionError("state qubit count differs from circuit");
  return DensityMatrix(circ.num_qubits(), evolve_matrix(circ, theta, noise, rho0.matrix()));
}

std::vector<CMatrix> trajectory(const Circuit& circ, const RVector& theta,
                                const NoiseSpec& noise, const CMatrix& rho0) {
  check_theta(circ, theta);
  check_state(circ, rho0);
  std::vector<CMatrix> out{rho0};
  for (int l = 0; l < circ.num_layers(); ++l) {
    out.push_back(run_layer_range(circ, theta, noise, out.back(), l, 0, true));
  }
  return out;
}

LinearMap layer_map(const Circuit& circ, const RVector& theta, const NoiseSpec& noise, int layer) {
  check_theta(circ, theta);
  circ.layer(layer);
  return [circ, theta, noise, layer](const CMatrix& x) {
    return run_layer_range(circ, theta, noise, x, layer, 0, true);
  };
}

DensityMatrix zero_state(int num_qubits) { return DensityMatrix::basis_state(num_qubits, 0); }

}  // namespace nibp
