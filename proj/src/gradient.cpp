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

#include "nibp/gradient.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nibp/parallel.hpp"

namespace nibp {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double angle_at(const Circuit& circ, const RVector& theta, const GateLocation& loc) {
  if (!circ.gate(loc).parameterized()) {
    throw PreconditionError("gate at " + to_string(loc) + " is not parameterized");
  }
  return theta(static_cast<Eigen::Index>(circ.parameter_index(loc)));
}

struct Branch {
  PauliString shift;
  double weight;
};

// Weighted shift branches of the generalized rule at a control-noise gate.
std::vector<Branch> control_branches(const Gate& g, const std::vector<PauliTerm>& a) {
  std::vector<Branch> out{{g.generator(), 1.0}};
  for (const PauliTerm& t : a) out.push_back({t.pauli, t.coeff});
  return out;
}

CMatrix output_of(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                  const GateLocation& loc, const CMatrix& after_gate) {
  return evolve_suffix(circ, theta, noise, after_gate, loc);
}

// rho^+ - rho^- at the output for the shifted branch of `shift`.
CMatrix difference_from(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                        const GateLocation& loc, const PauliString& shift, const CMatrix& before) {
  const double th = angle_at(circ, theta, loc);
  const Gate& g = circ.gate(loc);
  CMatrix plus = pauli_rotate(shift, kHalfPi, before);
  CMatrix minus = pauli_rotate(shift, -kHalfPi, before);
  if (const std::vector<PauliTerm>* a = noise.control(loc)) {
    const Gate pg = perturbed_gate(g, *a);
    plus = pg.apply(plus, th);
    minus = pg.apply(minus, th);
  } else if (noise.mixture(loc)) {
    // V'_k(theta) for the branch generated by `shift`.
    plus = pauli_rotate(shift, th, plus);
    minus = pauli_rotate(shift, th, minus);
  } else {
    plus = g.apply(plus, th);
    minus = g.apply(minus, th);
  }
  return output_of(circ, theta, noise, loc, plus) - output_of(circ, theta, noise, loc, minus);
}

void check_hamiltonian(const Circuit& circ, const Hamiltonian& h) {
  if (h.num_qubits() != circ.num_qubits()) throw DimensionError("Hamiltonian and circuit disagree on n");
}

}  // namespace

RVector random_angles(std::size_t count, Rng& rng) {
  RVector t(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return t;
}

double psr_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                    const Hamiltonian& h, const GateLocation& loc, const CMatrix& rho0) {
  check_hamiltonian(circ, h);
  const double th = angle_at(circ, theta, loc);
  const CMatrix before = evolve_prefix(circ, theta, noise, rho0, loc);
  if (const std::vector<PauliTerm>* a = noise.control(loc)) {
    double value = 0.0;
    for (const Branch& b : control_branches(circ.gate(loc), *a)) {
      if (b.weight == 0.0 || b.shift.is_identity()) continue;
      value += 0.5 * b.weight * cost(h, difference_from(circ, theta, noise, loc, b.shift, before));
    }
    return value;
  }
  const double plus = cost(h, output_of(circ, theta, noise, loc,
                                        apply_noisy_gate(circ, loc, th + kHalfPi, noise, before)));
  const double minus = cost(h, output_of(circ, theta, noise, loc,
                                         apply_noisy_gate(circ, loc, th - kHalfPi, noise, before)));
  return 0.5 * (plus - minus);
}

double psr_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                    const Hamiltonian& h, const GateLocation& loc) {
  return psr_gradient(circ, theta, noise, h, loc, zero_state(circ.num_qubits()).matrix());
}

double fd_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                   const Hamiltonian& h, const GateLocation& loc, double step) {
  if (!(step >= 1e-7 && step <= 1e-3)) throw PreconditionError("finite-difference step must lie in [1e-7, 1e-3]");
  check_hamiltonian(circ, h);
  angle_at(circ, theta, loc);
  const auto idx = static_cast<Eigen::Index>(circ.parameter_index(loc));
  const CMatrix rho0 = zero_state(circ.num_qubits()).matrix();
  RVector shifted = theta;
  shifted(idx) = theta(idx) + step;
  const double plus = cost(h, evolve_matrix(circ, shifted, noise, rho0));
  shifted(idx) = theta(idx) - step;
  const double minus = cost(h, evolve_matrix(circ, shifted, noise, rho0));
  return (plus - minus) / (2.0 * step);
}

CMatrix branch_difference(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                          const GateLocation& loc, const PauliString& shift, const CMatrix& rho0) {
  return difference_from(circ, theta, noise, loc, shift, evolve_prefix(circ, theta, noise, rho0, loc));
}

double coherence_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                          const Hamiltonian& h, const GateLocation& loc) {
  if (circ.num_qubits() > kMaxAffineQubits) throw SizeError("coherence path supports at most 3 qubits");
  check_hamiltonian(circ, h);
  const NiceBasis basis = build_nice_basis(circ.num_qubits());
  const HVector hv = h_vector(h, basis);
  const CMatrix before = evolve_prefix(circ, theta, noise, zero_state(circ.num_qubits()).matrix(), loc);
  const double th = angle_at(circ, theta, loc);
  RVector w = RVector::Zero(hv.h.size());
  if (const std::vector<PauliTerm>* a = noise.control(loc)) {
    for (const Branch& b : control_branches(circ.gate(loc), *a)) {
      if (b.weight == 0.0 || b.shift.is_identity()) continue;
      w += b.weight * coherence_coordinates(difference_from(circ, theta, noise, loc, b.shift, before), basis);
    }
  } else {
    const RVector plus = coherence_coordinates(
        output_of(circ, theta, noise, loc, apply_noisy_gate(circ, loc, th + kHalfPi, noise, before)), basis);
    const RVector minus = coherence_coordinates(
        output_of(circ, theta, noise, loc, apply_noisy_gate(circ, loc, th - kHalfPi, noise, before)), basis);
    w = plus - minus;
  }
  return 0.5 * std::abs(w.dot(hv.h));
}

BoundedGradient control_noise_gradient(const Circuit& circ, const RVector& theta,
                                       const NoiseSpec& noise, const Hamiltonian& h,
                                       const GateLocation& loc) {
  check_hamiltonian(circ, h);
  const CMatrix before = evolve_prefix(circ, theta, noise, zero_state(circ.num_qubits()).matrix(), loc);
  const Gate& g = circ.gate(loc);
  angle_at(circ, theta, loc);
  BoundedGradient out;
  out.h_norm = h.h_norm();
  const CMatrix xi_j = difference_from(circ, theta, noise, loc, g.generator(), before);
  out.w_intended = xi_j.norm();
  out.value = 0.5 * cost(h, xi_j);
  out.bound = 0.5 * out.w_intended * out.h_norm;
  if (const std::vector<PauliTerm>* a = noise.control(loc)) {
    for (const PauliTerm& t : *a) {
      const CMatrix xi = difference_from(circ, theta, noise, loc, t.pauli, before);
      out.w_terms.push_back(xi.norm());
      out.value += 0.5 * t.coeff * cost(h, xi);
      out.bound += 0.5 * std::abs(t.coeff) * out.w_terms.back() * out.h_norm;
    }
  }
  return out;
}

BoundedGradient random_noise_gradient(const Circuit& circ, const RVector& theta,
                                      const NoiseSpec& noise, const Hamiltonian& h,
                                      const GateLocation& loc) {
  check_hamiltonian(circ, h);
  const UnitaryMixture* mix = noise.mixture(loc);
  if (!mix) throw PreconditionError("no random-unitary noise at " + to_string(loc));
  BoundedGradient out;
  out.h_norm = h.h_norm();
  out.value = psr_gradient(circ, theta, noise, h, loc);

  NoiseSpec ideal = noise;
  ideal.clear_gate_noise(loc);
  const double p_j = mix->branches[mix->intended].probability;
  out.bound = p_j * std::abs(psr_gradient(circ, theta, ideal, h, loc));

  const CMatrix before = evolve_prefix(circ, theta, noise, zero_state(circ.num_qubits()).matrix(), loc);
  for (std::size_t k = 0; k < mix->branches.size(); ++k) {
    const auto& b = mix->branches[k];
    if (k == mix->intended) {
      out.w_intended = difference_from(circ, theta, noise, loc, b.pauli, before).norm();
      continue;
    }
    out.w_terms.push_back(difference_from(circ, theta, noise, loc, b.pauli, before).norm());
    out.bound += 0.5 * b.probability * out.w_terms.back() * out.h_norm;
  }
  return out;
}

std::vector<GradientStats> gradient_stats(const GradientSweep& sweep) {
  if (sweep.hamiltonians.empty() || sweep.locations.empty() || sweep.theta_samples < 1) {
    throw PreconditionError("gradient sweep needs Hamiltonians, locations and theta samples");
  }
  for (const GateLocation& loc : sweep.locations) angle_at(sweep.circuit, RVector::Zero(
      static_cast<Eigen::Index>(sweep.circuit.num_parameters())), loc);

  const std::size_t per_instance = static_cast<std::size_t>(sweep.theta_samples);
  const std::size_t total = sweep.hamiltonians.size() * per_instance;
  const std::size_t nloc = sweep.locations.size();
  std::vector<double> values(total * nloc);
  const CMatrix rho0 = zero_state(sweep.circuit.num_qubits()).matrix();

  parallel_for(total, sweep.threads, [&](std::size_t job) {
    const std::size_t instance = job / per_instance;
    const std::size_t sample = job % per_instance;
    Rng rng = make_rng(sweep.seed, {instance, sample});
    const RVector theta = random_angles(sweep.circuit.num_parameters(), rng);
    for (std::size_t j = 0; j < nloc; ++j) {
      values[job * nloc + j] = psr_gradient(sweep.circuit, theta, sweep.noise, sweep.hamiltonians[instance],
                                            sweep.locations[j], rho0);
    }
  });

  std::vector<GradientStats> out;
  for (std::size_t j = 0; j < nloc; ++j) {
    GradientStats s;
    s.location = sweep.locations[j];
    s.samples = total;
    s.min = std::numeric_limits<double>::infinity();
    s.max = 0.0;
    CompensatedSum sum_abs, sum_signed;
    for (std::size_t job = 0; job < total; ++job) {
      const double g = values[job * nloc + j];
      sum_abs.add(std::abs(g));
      sum_signed.add(g);
      s.min = std::min(s.min, std::abs(g));
      s.max = std::max(s.max, std::abs(g));
      const double hn = sweep.hamiltonians[job / per_instance].h_norm();
      s.max_ratio = std::max(s.max_ratio, hn > 0.0 ? std::abs(g) / hn : 0.0);
    }
    const double n = static_cast<double>(total);
    s.mean_abs = sum_abs.value() / n;
    const double mean_signed = sum_signed.value() / n;
    CompensatedSum dev_abs, dev_signed;
    for (std::size_t job = 0; job < total; ++job) {
      const double g = values[job * nloc + j];
      dev_abs.add((std::abs(g) - s.mean_abs) * (std::abs(g) - s.mean_abs));
      dev_signed.add((g - mean_signed) * (g - mean_signed));
    }
    s.variance = total > 1 ? dev_abs.value() / (n - 1.0) : 0.0;
    s.variance_signed = total > 1 ? dev_signed.value() / (n - 1.0) : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace nibp
