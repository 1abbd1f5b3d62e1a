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

#include <functional>
#include <string>
#include <vector>

#include "nibp/pauli.hpp"
#include "nibp/random.hpp"

namespace nibp {

/// CPTP map in Kraus form. Construction checks shapes only; trace
/// preservation is reported by validate_kraus so that broken channels can
/// still be inspected.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<CMatrix> kraus_ops);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dimension(num_qubits_); }
  const std::vector<CMatrix>& kraus_ops() const { return kraus_; }
  std::size_t size() const { return kraus_.size(); }

  /// sum_a K_a X K_a^dagger for any operator X.
  CMatrix apply(const CMatrix& op) const;

 private:
  int num_qubits_;
  std::vector<CMatrix> kraus_;
};

struct KrausValidation {
  static constexpr double kTolerance = 1e-9;
  /// ||sum K^dagger K - I|| (operator norm).
  double trace_residual;
  /// ||sum K K^dagger - I|| (operator norm).
  double unital_residual;
  bool trace_preserving;
  bool unital;
};

KrausValidation validate_kraus(const KrausChannel& channel);

enum class ShiftConvention { kNice, kBloch };

/// v' = M v + c on coherence vectors. In the nice convention v is expanded in
/// P_j / sqrt(d); the Bloch convention rescales both v and c by sqrt(d) and
/// leaves M unchanged.
struct AffineRep {
  int num_qubits = 1;
  RMatrix M;
  RVector c;
  ShiftConvention convention = ShiftConvention::kNice;
  /// Largest |Im| seen while forming M and c.
  double imag_residual = 0.0;

  RVector apply(const RVector& v) const { return M * v + c; }
  AffineRep in_convention(ShiftConvention target) const;
};

/// Explicit (M, c) are built only up to this many qubits.
inline constexpr int kMaxAffineQubits = 3;

using LinearMap = std::function<CMatrix(const CMatrix&)>;

/// M_ij = <F_i, N(F_j)>, c_i = <F_i, N(I)> / d. Throws SizeError above
/// kMaxAffineQubits and InvalidChannelError for non trace-preserving input.
AffineRep affine_rep(const KrausChannel& channel, const NiceBasis& basis);
/// Same construction for an arbitrary linear map on n-qubit operators.
AffineRep affine_rep(const LinearMap& map, const NiceBasis& basis);

struct PolarDecomposition {
  RMatrix rotation;  // O, orthogonal
  RMatrix dilation;  // S = sqrt(M^T M), symmetric PSD
  RVector singular_values;  // descending
};

/// M = O S. Throws NumericalError on non-finite input.
PolarDecomposition polar_decompose(const RMatrix& m);
inline PolarDecomposition polar_decompose(const AffineRep& rep) { return polar_decompose(rep.M); }

enum class ChannelKind { kUnitary, kUnitalNonunitary, kHsContractiveNonunital, kNonunitalNoncontractive };

std::string to_string(ChannelKind kind);

struct ChannelClass {
  static constexpr double kShiftTol = 1e-9;
  static constexpr double kContractiveMargin = 1e-9;

  ChannelKind kind;
  double operator_norm;
  double sigma_max;
  double sigma_min;
  double shift_norm;  // ||c|| in the nice convention
};

ChannelClass classify(const AffineRep& rep);
ChannelClass classify(const KrausChannel& channel);

/// Kraus set {K_b J_a}: `first` then `second`.
KrausChannel compose(const KrausChannel& second, const KrausChannel& first);

/// Kronecker product of single-qubit channels; factor 0 acts on qubit 0.
KrausChannel tensor_channel(const std::vector<KrausChannel>& per_qubit);

// Channel zoo.

KrausChannel identity_channel(int num_qubits);
KrausChannel unitary_channel(const CMatrix& u);
/// K0 = |0><0| + sqrt(1-p)|1><1|, K1 = sqrt(p)|0><1|.
KrausChannel amplitude_damping(double p);
/// (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z).
KrausChannel depolarizing(double p);
/// sqrt(keep) I, sqrt(1-keep) X: flips with probability 1 - keep.
KrausChannel bit_flip(double keep_probability);
/// sqrt(keep) I, sqrt(1-keep) Z.
KrausChannel phase_flip(double keep_probability);
/// Bit flip at keep probability 1/2 followed by amplitude damping p. Its M
/// has a zero singular value.
KrausChannel flip_then_damp(double p);

/// Haar-random unitary channel on n qubits.
KrausChannel haar_unitary_channel(int num_qubits, Rng& rng);
/// Convex mixture of `terms` Haar unitaries with Dirichlet(1) weights.
KrausChannel random_unital_channel(int num_qubits, Rng& rng, int terms = 3);
/// Slices a Haar isometry d -> d k into k Kraus operators, redrawing while the
/// result is unital within 1e-6.
KrausChannel random_nonunital_channel(int num_qubits, Rng& rng, int kraus_rank = 2);

/// Named single-qubit channel with one parameter p: "identity",
/// "depolarizing", "amplitude_damping", "bit_flip", "phase_flip",
/// "flip_then_damp".
KrausChannel named_channel(const std::string& name, double p);

}  // namespace nibp
