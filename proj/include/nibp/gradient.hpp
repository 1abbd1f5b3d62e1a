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
#include "nibp/hamiltonian.hpp"

namespace nibp {

enum class GradientMethod { kPsr, kFiniteDifference, kCoherenceOverlap };

struct GradientSample {
  GateLocation location;
  RVector theta;
  double value = 0.0;
  GradientMethod method = GradientMethod::kPsr;
};

/// dC/dtheta_mu from +-pi/2 shifted branches. For ideal and random-unitary
/// gates this is 1/2 [C(theta + pi/2 e_mu) - C(theta - pi/2 e_mu)]. A gate
/// with control noise U' = exp(-i theta (P + A) / 2) is differentiated as
/// 1/2 sum_k w_k Tr[H (rho_k^+ - rho_k^-)], rho_k^+- = rest(U'(theta)
/// U_k(+-pi/2) rho~), with w = 1 for P and a_k for each term of A. Both forms
/// are exact. Throws PreconditionError at a fixed gate.
double psr_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                    const Hamiltonian& h, const GateLocation& loc, const CMatrix& rho0);
double psr_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                    const Hamiltonian& h, const GateLocation& loc);

inline constexpr double kDefaultFdStep = 1e-5;

/// [C(theta + s e_mu) - C(theta - s e_mu)] / (2 s); s must lie in [1e-7, 1e-3].
double fd_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                   const Hamiltonian& h, const GateLocation& loc, double step = kDefaultFdStep);

/// |dC/dtheta_mu| as 1/2 |sum_k w_k (v_k^+ - v_k^-) . h| with explicit
/// coherence vectors of the output branches. SizeError above 3 qubits.
double coherence_gradient(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                          const Hamiltonian& h, const GateLocation& loc);

/// Output-state difference rho^+ - rho^- = w~ . F for one shifted branch.
/// `shift` is the Pauli used for the +-pi/2 insertion, and the gate at `loc`
/// acts as its noisy version (perturbed gate, mixture branch or ideal).
CMatrix branch_difference(const Circuit& circ, const RVector& theta, const NoiseSpec& noise,
                          const GateLocation& loc, const PauliString& shift, const CMatrix& rho0);

struct BoundedGradient {
  double value = 0.0;
  double bound = 0.0;
  double h_norm = 0.0;
  /// ||w~_j|| for the intended generator.
  double w_intended = 0.0;
  /// ||w~_k|| for each noise term, in input order.
  std::vector<double> w_terms;
};

/// Control-noise derivative and 1/2 ||w~_j|| ||h|| + 1/2 sum_k |a_k| ||w~_k|| ||h||.
/// A location without control noise is treated as a = 0.
BoundedGradient control_noise_gradient(const Circuit& circ, const RVector& theta,
                                       const NoiseSpec& noise, const Hamiltonian& h,
                                       const GateLocation& loc);

/// Random-unitary derivative and p_j |dC_ideal| + 1/2 sum_{k != j} p_k ||w~_k|| ||h||,
/// where dC_ideal replaces the mixture at `loc` by the intended gate. Every
/// branch shares the gate angle. Throws PreconditionError without a mixture.
BoundedGradient random_noise_gradient(const Circuit& circ, const RVector& theta,
                                      const NoiseSpec& noise, const Hamiltonian& h,
                                      const GateLocation& loc);

struct GradientSweep {
  Circuit circuit{1};
  NoiseSpec noise;
  std::vector<Hamiltonian> hamiltonians;
  std::vector<GateLocation> locations;
  int theta_samples = 20;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Statistics of |dC/dtheta_mu| over uniform theta in [0, 2 pi) and
/// Hamiltonian instances.
struct GradientStats {
  GateLocation location;
  double mean_abs = 0.0;
  /// Sample variance of |dC|.
  double variance = 0.0;
  /// Sample variance of dC.
  double variance_signed = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// max over samples of |dC| / ||h|| of the sample's Hamiltonian.
  double max_ratio = 0.0;
  std::size_t samples = 0;
};

/// Sample s of instance i uses angles from make_rng(seed, {i, s}); results do
/// not depend on the thread count.
std::vector<GradientStats> gradient_stats(const GradientSweep& sweep);

/// Uniform angles in [0, 2 pi).
RVector random_angles(std::size_t count, Rng& rng);

}  // namespace nibp
