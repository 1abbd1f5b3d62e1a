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


#include "nibp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nibp {

namespace {

constexpr double kShiftTol = 1e-9;
constexpr double kVanishing = 1e-14;

double sigma_max(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<RMatrix>(m).singularValues()(0);
}

double sigma_min(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  const RVector s = Eigen::JacobiSVD<RMatrix>(m).singularValues();
  return s(s.size() - 1);
}

void check_small(const Circuit& circ, const char* what) {
  if (circ.num_qubits() > kMaxAffineQubits) {
    throw SizeError(std::string(what) + " needs the explicit affine path (n <= " +
                    std::to_string(kMaxAffineQubits) + ")");
  }
}

AffineRep noise_rep(const Circuit& circ, const NoiseSpec& noise, int layer,
                    const NiceBasis& basis) {
  return affine_rep(
      LinearMap([&circ, &noise, layer](const CMatrix& x) {
        return apply_layer_noise(circ, layer, noise, x);
      }),
      basis);
}

// Noisy gates of one layer with the angle at `shifted` moved by `shift`.
AffineRep gates_rep(const Circuit& circ, const NoiseSpec& noise, const RVector& theta, int layer,
                    const GateLocation& shifted, double shift, const NiceBasis& basis) {
  return affine_rep(
      LinearMap([&](const CMatrix& x) {
        CMatrix y = x;
        const auto& gates = circ.layer(layer);
        for (int s = 0; s < static_cast<int>(gates.size()); ++s) {
          const GateLocation loc{layer, s};
          double angle = 0.0;
          if (gates[static_cast<std::size_t>(s)].parameterized()) {
            angle = theta(circ.parameter_index(loc));
            if (loc == shifted) angle += shift;
          }
          y = apply_noisy_gate(circ, loc, angle, noise, y);
        }
        return y;
      }),
      basis);
}

std::vector<AffineRep> layer_reps(const Circuit& circ, const NoiseSpec& noise,
                                  const RVector& theta, const NiceBasis& basis) {
  std::vector<AffineRep> reps;
  for (int l = 0; l < circ.num_layers(); ++l) {
    reps.push_back(affine_rep(layer_map(circ, theta, noise, l), basis));
  }
  return reps;
}

double geometric_sum(double p, int terms) {
  double total = 0.0;
  double power = 1.0;
  for (int k = 0; k < terms; ++k) {
    total += power;
    power *= p;
  }
  return total;
}

double shift_scale(int num_qubits) {
  return std::sqrt(1.0 - 1.0 / static_cast<double>(dimension(num_qubits)));
}

}  // namespace

double channel_factor(const NoiseSpec& noise, int layer) {
  double worst = 0.0;
  bool any = false;
  for (const auto& local : noise.layer(layer)) {
    worst = std::max(worst, classify(local.channel).sigma_max);
    any = true;
  }
  return any ? worst : 1.0;
}

double layer_opnorm(const Circuit& circ, const NoiseSpec& noise, int layer) {
  if (circ.num_qubits() > kMaxAffineQubits) return channel_factor(noise, layer);
  const NiceBasis basis = build_nice_basis(circ.num_qubits());
  return sigma_max(noise_rep(circ, noise, layer, basis).M);
}

ContractivityProfile contractivity_profile(const Circuit& circ, const NoiseSpec& noise,
                                           const RVector& theta, const CMatrix& rho0) {
  ContractivityProfile out;
  out.explicit_path = circ.num_qubits() <= kMaxAffineQubits;
  for (int l = 0; l < circ.num_layers(); ++l) {
    out.opnorm.push_back(layer_opnorm(circ, noise, l));
    out.channel_factor.push_back(channel_factor(noise, l));
  }
  if (out.explicit_path) {
    const NiceBasis basis = build_nice_basis(circ.num_qubits());
    const auto states = trajectory(circ, theta, noise, rho0);
    const auto reps = layer_reps(circ, noise, theta, basis);
    for (int l = 0; l < circ.num_layers(); ++l) {
      const RVector v = coherence_coordinates(states[static_cast<std::size_t>(l)], basis);
      const double norm = v.norm();
      out.q.push_back(norm < kVanishing ? 0.0
                                        : (reps[static_cast<std::size_t>(l)].M * v).norm() / norm);
    }
  }
  if (!out.opnorm.empty()) {
    out.r = *std::max_element(out.opnorm.begin(), out.opnorm.end());
    out.r_channel = *std::max_element(out.channel_factor.begin(), out.channel_factor.end());
  }
  return out;
}

double nibp_bound(double h_norm, double r, int num_layers) {
  if (!(r >= 0.0 && r < 1.0)) {
    throw PreconditionError("exponential decay needs 0 <= r < 1, got " + std::to_string(r));
  }
  if (num_layers < 0) throw PreconditionError("negative depth");
  return h_norm * std::pow(r, num_layers);
}

L0Threshold l0_threshold(double c, double q_exponent, double locality, double r) {
  if (!(r > 0.0 && r < 1.0)) throw PreconditionError("l0 threshold needs 0 < r < 1");
  if (!(c > 0.0)) throw PreconditionError("l0 threshold needs c > 0");
  if (q_exponent < 1.0) throw PreconditionError("depth scaling L = c n^Q needs Q >= 1");
  const double log_inv_r = std::log(1.0 / r);
  L0Threshold out;
  if (q_exponent == 1.0) {
    out.condition = locality < 2.0 * c * log_inv_r;
    return out;
  }
  out.l0 = std::pow(c, 1.0 - q_exponent) *
           std::pow((locality / 2.0) / log_inv_r, q_exponent / (q_exponent - 1.0));
  return out;
}

double lambda_l(double p, int num_layers, double h_norm, int num_qubits) {
  if (p < 0.0) throw PreconditionError("negative contraction factor");
  return geometric_sum(p, num_layers) * h_norm / shift_scale(num_qubits);
}

double lambda_inf(double p, double h_norm, int num_qubits) {
  if (!(p >= 0.0 && p < 1.0)) throw PreconditionError("infinite-depth radius needs 0 <= p < 1");
  return h_norm / ((1.0 - p) * shift_scale(num_qubits));
}

ShiftAccumulation shift_accumulator(const Circuit& circ, const NoiseSpec& noise,
                                    const RVector& theta, const Hamiltonian& h, int upto) {
  check_small(circ, "shift accumulator");
  if (upto < 1 || upto > circ.num_layers()) {
    throw PreconditionError("accumulation depth outside 1.." + std::to_string(circ.num_layers()));
  }
  const NiceBasis basis = build_nice_basis(circ.num_qubits());
  ShiftAccumulation out;
  out.d = RVector::Zero(static_cast<Eigen::Index>(basis.size() - 1));
  for (int l = 0; l < upto; ++l) {
    out.d = affine_rep(layer_map(circ, theta, noise, l), basis).apply(out.d);
    out.p = std::max(out.p, layer_opnorm(circ, noise, l));
  }
  const HVector hv = h_vector(h, basis);
  out.d_dot_h = out.d.dot(hv.h);
  out.lambda = lambda_l(out.p, upto, hv.h.norm(), circ.num_qubits());
  return out;
}

NilsInterval nils_interval(double trace_over_dim, double h_norm, int num_qubits, double p,
                           int num_layers, bool unital) {
  NilsInterval out;
  out.center = trace_over_dim;
  if (unital) return out;
  if (!(p >= 0.0 && p < 1.0)) throw PreconditionError("NILS radius needs 0 <= p < 1");
  out.lambda_L = lambda_l(p, num_layers, h_norm, num_qubits);
  out.lambda_inf = lambda_inf(p, h_norm, num_qubits);
  return out;
}

NilsInterval nils_interval(const Circuit& circ, const NoiseSpec& noise, const RVector& theta,
                           const Hamiltonian& h) {
  const int n = circ.num_qubits();
  const int depth = circ.num_layers();
  double p = 0.0;
  for (int l = 0; l < depth; ++l) p = std::max(p, layer_opnorm(circ, noise, l));
  NilsInterval out =
      nils_interval(h.trace_over_dim(), h.h_norm(), n, p, depth, noise.unital(depth));
  if (n <= kMaxAffineQubits && depth > 0) {
    const ShiftAccumulation acc = shift_accumulator(circ, noise, theta, h, depth);
    out.d_L = acc.d;
    out.d_L_dot_h = acc.d_dot_h;
  }
  return out;
}

double escape_rl(double lambda, int l) { return geometric_sum(lambda, l - 1) - 1.0; }

EscapeReport escape_report(const std::vector<AffineRep>& layers, int l,
                               const EscapeOptions& options) {
  const int depth = static_cast<int>(layers.size());
  if (l < 3 || l > depth) {
    throw PreconditionError("bifurcation layer must satisfy 3 <= l <= L");
  }
  EscapeReport out;
  out.l = l;
  out.num_layers = depth;
  const auto& at = [&](int i) -> const AffineRep& { return layers[static_cast<std::size_t>(i - 1)]; };

  for (int i = 1; i <= depth; ++i) {
    if (at(i).c.norm() > kShiftTol) out.applicable = true;
  }

  bool prefix_contractive = true;
  for (int i = 1; i <= l - 1; ++i) {
    const double s = sigma_max(at(i).M);
    out.sigma_max_prefix = std::max(out.sigma_max_prefix, s);
    out.c_tilde = std::max(out.c_tilde, at(i).c.norm());
    if (!(s < 1.0) || at(i).c.norm() <= kShiftTol) prefix_contractive = false;
  }
  out.c_last = at(l - 1).c.norm();
  out.r_l = escape_rl(out.sigma_max_prefix, l);

  if (out.c_tilde > 0.0) {
    const double target = out.c_last / out.c_tilde;
    if (escape_rl(0.5, l) <= target) {
      out.mu_star = 0.5;
    } else {
      double lo = 0.0;
      double hi = 0.5;
      while (hi - lo > options.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (escape_rl(mid, l) < target ? lo : hi) = mid;
      }
      out.mu_star = lo;
    }
  }
  out.d_prev_lower = out.c_last - out.c_tilde * out.r_l;

  out.suffix_positive = true;
  double suffix_product = 1.0;
  for (int i = l; i <= depth; ++i) {
    const double s = sigma_min(at(i).M);
    out.sigma_min_suffix.push_back(s);
    suffix_product *= s;
    if (!(s > kShiftTol) || !(sigma_max(at(i).M) < 1.0) || at(i).c.norm() <= kShiftTol) {
      out.suffix_positive = false;
    }
  }
  out.suffix_length = depth - l;
  out.suffix_bounded = out.suffix_length <= options.suffix_cap;
  out.prefix_condition = prefix_contractive && out.sigma_max_prefix < out.mu_star;

  out.separation = options.separation.value_or(2.0 * std::max(out.d_prev_lower, 0.0) *
                                               std::abs(std::sin(options.angle / 2.0)));
  double contraction = 2.0;
  for (int i = 1; i <= depth; ++i) contraction *= sigma_max(at(i).M);
  out.contracted_bound = contraction;
  out.lower_bound = suffix_product * out.separation - out.contracted_bound;

  out.escapes_nibp = out.applicable && out.prefix_condition && out.suffix_positive &&
                     out.suffix_bounded && out.lower_bound > 0.0;
  return out;
}

EscapeReport escape_report(const Circuit& circ, const NoiseSpec& noise, const RVector& theta,
                               const GateLocation& loc, EscapeOptions options) {
  check_small(circ, "escape report");
  if (!circ.gate(loc).parameterized()) throw PreconditionError("gate has no parameter");
  const NiceBasis basis = build_nice_basis(circ.num_qubits());
  std::vector<AffineRep> channels;
  for (int l = 0; l < circ.num_layers(); ++l) channels.push_back(noise_rep(circ, noise, l, basis));

  const int l = loc.layer + 1;
  if (l >= 3 && l <= circ.num_layers()) {
    RVector d = RVector::Zero(static_cast<Eigen::Index>(basis.size() - 1));
    for (int j = 0; j < loc.layer; ++j) {
      d = affine_rep(layer_map(circ, theta, noise, j), basis).apply(d);
    }
    const double half_pi = std::numbers::pi / 2.0;
    const RMatrix plus = gates_rep(circ, noise, theta, loc.layer, loc, half_pi, basis).M;
    const RMatrix minus = gates_rep(circ, noise, theta, loc.layer, loc, -half_pi, basis).M;
    options.separation = ((plus - minus) * d).norm();
  }
  return escape_report(channels, l, options);
}

ContractedPart contracted_part(const Circuit& circ, const NoiseSpec& noise, const RVector& theta,
                               const GateLocation& loc, const CMatrix& rho0) {
  check_small(circ, "contracted part");
  const NiceBasis basis = build_nice_basis(circ.num_qubits());
  const double half_pi = std::numbers::pi / 2.0;
  RVector plus = coherence_coordinates(rho0, basis);
  RVector minus = plus;
  ContractedPart out;
  out.bound = 2.0;
  for (int l = 0; l < circ.num_layers(); ++l) {
    const AffineRep channel = noise_rep(circ, noise, l, basis);
    out.bound *= sigma_max(channel.M);
    if (l == loc.layer) {
      plus = channel.M * gates_rep(circ, noise, theta, l, loc, half_pi, basis).M * plus;
      minus = channel.M * gates_rep(circ, noise, theta, l, loc, -half_pi, basis).M * minus;
    } else {
      const RMatrix omega = affine_rep(layer_map(circ, theta, noise, l), basis).M;
      plus = omega * plus;
      minus = omega * minus;
    }
  }
  out.norm = (plus - minus).norm();
  return out;
}

ConcentrationCheck concentration_check(const Circuit& circ, const NoiseSpec& noise,
                                       const RVector& theta, const Hamiltonian& h,
                                       const CMatrix& rho0) {
  check_small(circ, "concentration check");
  const NiceBasis basis = build_nice_basis(circ.num_qubits());
  const HVector hv = h_vector(h, basis);
  RVector d = RVector::Zero(static_cast<Eigen::Index>(basis.size() - 1));
  double product = 1.0;
  for (int l = 0; l < circ.num_layers(); ++l) {
    d = affine_rep(layer_map(circ, theta, noise, l), basis).apply(d);
    product *= layer_opnorm(circ, noise, l);
  }
  const double c = cost(h, evolve_matrix(circ, theta, noise, rho0));
  ConcentrationCheck out;
  out.gap = std::abs(c - h.trace_over_dim() - d.dot(hv.h));
  out.bound = hv.h.norm() * product * coherence_coordinates(rho0, basis).norm();
  return out;
}

}  // namespace nibp
