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

#include <optional>
#include <vector>

#include "nibp/circuit.hpp"
#include "nibp/hamiltonian.hpp"

namespace nibp {

/// Per-layer contraction data along one trajectory.
struct ContractivityProfile {
  /// Realized ||Omega_l v_{l-1}|| / ||v_{l-1}||; empty above 3 qubits. A
  /// vanishing v_{l-1} reports 0.
  std::vector<double> q;
  /// ||M_l|| of the layer channel; Omega_l = M_l O_l shares it.
  std::vector<double> opnorm;
  /// max_l opnorm_l.
  double r = 0.0;
  /// Largest sigma_max over the single local channels of each layer; the
  /// factor of the unital-form bound.
  std::vector<double> channel_factor;
  double r_channel = 0.0;
  /// True when opnorms come from the explicit (M, c) of the whole layer
  /// channel, false when taken as the largest per-channel factor.
  bool explicit_path = true;
};

/// Above 3 qubits opnorm_l is the largest sigma_max over the layer's local
/// channels, which is exact for unital channels on disjoint qubits.
ContractivityProfile contractivity_profile(const Circuit& circ, const NoiseSpec& noise,
                                           const RVector& theta, const CMatrix& rho0);

/// ||M|| of the channels of one layer.
double layer_opnorm(const Circuit& circ, const NoiseSpec& noise, int layer);
/// Largest sigma_max over the local channels of one layer; 1 for an empty
/// layer. Equals layer_opnorm for unital channels on disjoint qubits.
double channel_factor(const NoiseSpec& noise, int layer);

/// h_norm * r^L; PreconditionError unless 0 <= r < 1 and L >= 0.
double nibp_bound(double h_norm, double r, int num_layers);

struct L0Threshold {
  /// Q > 1: depth beyond which the bound decays exponentially.
  std::optional<double> l0;
  /// Q = 1: whether K < 2 c ln(1/r).
  std::optional<bool> condition;
};

/// Q > 1 gives L0 = c^{1-Q} ((K/2) / ln(1/r))^{Q/(Q-1)}; Q = 1 gives the
/// locality condition. PreconditionError for Q < 1, c <= 0 or r outside (0, 1).
L0Threshold l0_threshold(double c, double q_exponent, double locality, double r);

/// sum_{k=0}^{L-1} p^k * ||h|| / sqrt(1 - 1/d); p = 1 gives L ||h|| / sqrt(1 - 1/d).
double lambda_l(double p, int num_layers, double h_norm, int num_qubits);
/// ||h|| / ((1 - p) sqrt(1 - 1/d)); PreconditionError unless 0 <= p < 1.
double lambda_inf(double p, double h_norm, int num_qubits);

struct ShiftAccumulation {
  RVector d;
  double d_dot_h = 0.0;
  /// Largest ||M_l|| over the accumulated layers.
  double p = 0.0;
  double lambda = 0.0;
};

/// d_1 = c_1, d_j = Omega_j d_{j-1} + c_j over layers 1..upto, where layer j
/// is circuit layer j-1. SizeError above 3 qubits.
ShiftAccumulation shift_accumulator(const Circuit& circ, const NoiseSpec& noise,
                                    const RVector& theta, const Hamiltonian& h, int upto);

struct NilsInterval {
  double center = 0.0;
  double lambda_L = 0.0;
  double lambda_inf = 0.0;
  std::optional<RVector> d_L;
  std::optional<double> d_L_dot_h;
};

/// Interval from the norm data alone. A unital profile collapses to the
/// center. PreconditionError when p >= 1 for a non-unital profile.
NilsInterval nils_interval(double trace_over_dim, double h_norm, int num_qubits, double p,
                           int num_layers, bool unital);
/// Circuit-aware interval; fills d_L for n <= 3.
NilsInterval nils_interval(const Circuit& circ, const NoiseSpec& noise, const RVector& theta,
                           const Hamiltonian& h);

struct EscapeOptions {
  /// Largest L - l accepted as bounded.
  int suffix_cap = 3;
  double tolerance = 1e-10;
  /// Separation d_l of the two rotated copies of d_{l-1}. When absent it is
  /// 2 (||c_{l-1}|| - c~ r_l) |sin(phi/2)| with the angle below.
  std::optional<double> separation;
  double angle = 3.14159265358979323846;
};

struct EscapeReport {
  /// False when no layer has a shift (every map unital).
  bool applicable = false;
  int l = 0;
  int num_layers = 0;
  double sigma_max_prefix = 0.0;
  double c_last = 0.0;
  double c_tilde = 0.0;
  double mu_star = 0.0;
  double r_l = 0.0;
  /// ||c_{l-1}|| - c~ r_l, a lower bound on ||d_{l-1}||.
  double d_prev_lower = 0.0;
  std::vector<double> sigma_min_suffix;
  int suffix_length = 0;
  double separation = 0.0;
  /// 2 prod_i ||M_i||, the bound on the purely contracted part.
  double contracted_bound = 0.0;
  double lower_bound = 0.0;
  bool prefix_condition = false;
  bool suffix_positive = false;
  bool suffix_bounded = false;
  bool escapes_nibp = false;
};

/// sum_{k=1}^{l-2} lambda^k.
double escape_rl(double lambda, int l);

/// `layers[i]` is the affine map of channel i+1; l is the bifurcation layer
/// counted from 1. PreconditionError when l < 3 or l > L.
EscapeReport escape_report(const std::vector<AffineRep>& layers, int l,
                               const EscapeOptions& options = {});

/// Same report with the channel maps of `circ` and the exact separation
/// ||(O^+ - O^-) d_{l-1}|| at `loc`; n <= 3.
EscapeReport escape_report(const Circuit& circ, const NoiseSpec& noise, const RVector& theta,
                               const GateLocation& loc, EscapeOptions options = {});

struct ContractedPart {
  /// ||Omega_L ... (Omega^+ - Omega^-) ... Omega_1 v_0||.
  double norm = 0.0;
  /// 2 prod_l ||M_l||.
  double bound = 0.0;
};

/// Linear (shift-free) part of the bifurcated coherence vector; n <= 3.
ContractedPart contracted_part(const Circuit& circ, const NoiseSpec& noise, const RVector& theta,
                               const GateLocation& loc, const CMatrix& rho0);

struct ConcentrationCheck {
  /// |C - Tr(H)/d - d_L . h|.
  double gap = 0.0;
  /// ||h|| prod_l ||M_l|| ||v_0||.
  double bound = 0.0;
};

ConcentrationCheck concentration_check(const Circuit& circ, const NoiseSpec& noise,
                                       const RVector& theta, const Hamiltonian& h,
                                       const CMatrix& rho0);

}  // namespace nibp
