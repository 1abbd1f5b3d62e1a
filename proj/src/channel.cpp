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

#include "nibp/channel.hpp"

#include <cmath>

#include "nibp/kernels.hpp"

namespace nibp {

namespace {

double hermitian_opnorm(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw PreconditionError(std::string(what) + " must lie in [0, 1]");
  }
}

CMatrix pauli2(PauliLetter letter) { return PauliString::single(1, 0, letter).matrix(); }

}  // namespace

KrausChannel::KrausChannel(std::vector<CMatrix> kraus_ops) : num_qubits_(0), kraus_(std::move(kraus_ops)) {
  if (kraus_.empty()) throw InvalidChannelError("empty Kraus list");
  const Eigen::Index d = kraus_.front().rows();
  for (const CMatrix& k : kraus_) {
    if (k.rows() != d || k.cols() != d) {
      throw DimensionError("Kraus operators must be square with a shared dimension");
    }
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  if ((Eigen::Index{1} << n) != d || n < 1 || n > kMaxQubits) {
    throw DimensionError("Kraus dimension must be 2^n with 1 <= n <= 9");
  }
  num_qubits_ = n;
}

CMatrix KrausChannel::apply(const CMatrix& op) const {
  if (op.rows() != static_cast<Eigen::Index>(dim()) || op.cols() != op.rows()) {
    throw DimensionError("operator dimension does not match channel");
  }
  CMatrix out = CMatrix::Zero(op.rows(), op.cols());
  for (const CMatrix& k : kraus_) out.noalias() += k * op * k.adjoint();
  return out;
}

KrausValidation validate_kraus(const KrausChannel& channel) {
  const auto d = static_cast<Eigen::Index>(channel.dim());
  CMatrix tp = -CMatrix::Identity(d, d);
  CMatrix un = -CMatrix::Identity(d, d);
  for (const CMatrix& k : channel.kraus_ops()) {
    tp.noalias() += k.adjoint() * k;
    un.noalias() += k * k.adjoint();
  }
  KrausValidation out{};
  out.trace_residual = hermitian_opnorm(tp);
  out.unital_residual = hermitian_opnorm(un);
  out.trace_preserving = out.trace_residual <= KrausValidation::kTolerance;
  out.unital = out.unital_residual <= KrausValidation::kTolerance;
  return out;
}

AffineRep AffineRep::in_convention(ShiftConvention target) const {
  if (target == convention) return *this;
  AffineRep out = *this;
  const double root_d = std::sqrt(static_cast<double>(dimension(num_qubits)));
  out.c = (target == ShiftConvention::kBloch) ? RVector(c * root_d) : RVector(c / root_d);
  out.convention = target;
  return out;
}

AffineRep affine_rep(const LinearMap& map, const NiceBasis& basis) {
  if (basis.num_qubits() > kMaxAffineQubits) {
    throw SizeError("explicit affine representation limited to " +
                    std::to_string(kMaxAffineQubits) + " qubits");
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  const auto m = static_cast<Eigen::Index>(basis.size() - 1);
  AffineRep rep;
  rep.num_qubits = basis.num_qubits();
  rep.M.resize(m, m);
  rep.c.resize(m);
  double imag = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const CMatrix image = map(basis.element(static_cast<std::size_t>(j + 1)));
    for (Eigen::Index i = 0; i < m; ++i) {
      const Complex t = basis.scale() * pauli_trace(basis.string(static_cast<std::size_t>(i + 1)), image);
      rep.M(i, j) = t.real();
      imag = std::max(imag, std::abs(t.imag()));
    }
  }
  const CMatrix image_of_identity = map(CMatrix::Identity(d, d));
  for (Eigen::Index i = 0; i < m; ++i) {
    const Complex t = basis.scale() *
                      pauli_trace(basis.string(static_cast<std::size_t>(i + 1)), image_of_identity) /
                      static_cast<double>(d);
    rep.c(i) = t.real();
    imag = std::max(imag, std::abs(t.imag()));
  }
  rep.imag_residual = imag;
  return rep;
}

AffineRep affine_rep(const KrausChannel& channel, const NiceBasis& basis) {
  if (channel.num_qubits() != basis.num_qubits()) {
    throw DimensionError("channel and basis disagree on qubit count");
  }
  if (basis.num_qubits() > kMaxAffineQubits) {
    throw SizeError("explicit affine representation limited to " +
                    std::to_string(kMaxAffineQubits) + " qubits");
  }
  const KrausValidation check = validate_kraus(channel);
  if (!check.trace_preserving) {
    throw InvalidChannelError("channel is not trace preserving (residual " +
                              std::to_string(check.trace_residual) + ")");
  }
  return affine_rep([&channel](const CMatrix& x) { return channel.apply(x); }, basis);
}

PolarDecomposition polar_decompose(const RMatrix& m) {
  if (!m.allFinite()) throw NumericalError("polar decomposition of non-finite matrix");
  Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  PolarDecomposition out;
  out.singular_values = svd.singularValues();
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.dilation = svd.matrixV() * out.singular_values.asDiagonal() * svd.matrixV().transpose();
  out.dilation = (0.5 * (out.dilation + out.dilation.transpose())).eval();
  return out;
}

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kUnitary: return "unitary";
    case ChannelKind::kUnitalNonunitary: return "unital_nonunitary";
    case ChannelKind::kHsContractiveNonunital: return "hs_contractive_nonunital";
    case ChannelKind::kNonunitalNoncontractive: return "nonunital_noncontractive";
  }
  return "unknown";
}

ChannelClass classify(const AffineRep& rep) {
  const AffineRep nice = rep.in_convention(ShiftConvention::kNice);
  const RVector sv = polar_decompose(nice.M).singular_values;
  ChannelClass out{};
  out.operator_norm = sv.size() ? sv(0) : 0.0;
  out.sigma_max = out.operator_norm;
  out.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  out.shift_norm = nice.c.norm();
  const bool unital = out.shift_norm <= ChannelClass::kShiftTol;
  const double orth_residual =
      sv.size() ? (sv.array() - 1.0).abs().maxCoeff() : 0.0;
  if (unital) {
    out.kind = orth_residual <= ChannelClass::kShiftTol ? ChannelKind::kUnitary
                                                        : ChannelKind::kUnitalNonunitary;
  } else {
    out.kind = out.operator_norm < 1.0 - ChannelClass::kContractiveMargin
                   ? ChannelKind::kHsContractiveNonunital
                   : ChannelKind::kNonunitalNoncontractive;
  }
  return out;
}

ChannelClass classify(const KrausChannel& channel) {
  return classify(affine_rep(channel, build_nice_basis(channel.num_qubits())));
}

KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (second.dim() != first.dim()) throw DimensionError("cannot compose channels of different size");
  std::vector<CMatrix> ops;
  ops.reserve(first.size() * second.size());
  for (const CMatrix& j : first.kraus_ops()) {
    for (const CMatrix& k : second.kraus_ops()) ops.push_back(k * j);
  }
  return KrausChannel(std::move(ops));
}

KrausChannel tensor_channel(const std::vector<KrausChannel>& per_qubit) {
  if (per_qubit.empty()) throw InvalidChannelError("no channel factors");
  if (per_qubit.size() > static_cast<std::size_t>(kMaxQubits)) {
    throw SizeError("tensor product exceeds 9 qubits");
  }
  std::size_t total_ops = 1;
  for (const KrausChannel& ch : per_qubit) {
    if (ch.num_qubits() != 1) throw DimensionError("tensor factors must be single-qubit channels");
    total_ops *= ch.size();
  }
  const std::size_t d = dimension(static_cast<int>(per_qubit.size()));
  if (total_ops * d * d > (std::size_t{1} << 26)) {
    throw SizeError("tensor-product Kraus set too large to materialize");
  }
  std::vector<CMatrix> ops{CMatrix::Identity(1, 1)};
  for (const KrausChannel& ch : per_qubit) {
    std::vector<CMatrix> next;
    next.reserve(ops.size() * ch.size());
    for (const CMatrix& a : ops) {
      for (const CMatrix& b : ch.kraus_ops()) {
        CMatrix kron(a.rows() * 2, a.cols() * 2);
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          for (Eigen::Index c = 0; c < a.cols(); ++c) {
            kron.block(2 * r, 2 * c, 2, 2) = a(r, c) * b;
          }
        }
        next.push_back(std::move(kron));
      }
    }
    ops = std::move(next);
  }
  return KrausChannel(std::move(ops));
}

KrausChannel identity_channel(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) throw SizeError("qubit count out of range");
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  return KrausChannel({CMatrix::Identity(d, d)});
}

KrausChannel unitary_channel(const CMatrix& u) {
  const CMatrix residual = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  if (residual.cwiseAbs().maxCoeff() > 1e-10) throw PreconditionError("matrix is not unitary");
  return KrausChannel({u});
}

KrausChannel amplitude_damping(double p) {
  check_probability(p, "amplitude damping probability");
  CMatrix k0 = CMatrix::Zero(2, 2);
  CMatrix k1 = CMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - p);
  k1(0, 1) = std::sqrt(p);
  return KrausChannel({k0, k1});
}

KrausChannel depolarizing(double p) {
  check_probability(p, "depolarizing probability");
  const double w = std::sqrt(p / 3.0);
  return KrausChannel({std::sqrt(1.0 - p) * CMatrix::Identity(2, 2), w * pauli2(PauliLetter::X),
                       w * pauli2(PauliLetter::Y), w * pauli2(PauliLetter::Z)});
}

KrausChannel bit_flip(double keep_probability) {
  check_probability(keep_probability, "bit flip keep probability");
  return KrausChannel({std::sqrt(keep_probability) * CMatrix::Identity(2, 2),
                       std::sqrt(1.0 - keep_probability) * pauli2(PauliLetter::X)});
}

KrausChannel phase_flip(double keep_probability) {
  check_probability(keep_probability, "phase flip keep probability");
  return KrausChannel({std::sqrt(keep_probability) * CMatrix::Identity(2, 2),
                       std::sqrt(1.0 - keep_probability) * pauli2(PauliLetter::Z)});
}

KrausChannel flip_then_damp(double p) { return compose(amplitude_damping(p), bit_flip(0.5)); }

KrausChannel haar_unitary_channel(int num_qubits, Rng& rng) {
  return KrausChannel({haar_unitary(static_cast<Eigen::Index>(dimension(num_qubits)), rng)});
}

KrausChannel random_unital_channel(int num_qubits, Rng& rng, int terms) {
  if (terms < 1) throw PreconditionError("mixture needs at least one term");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(terms));
  double total = 0.0;
  for (double& x : w) total += (x = expo(rng));
  std::vector<CMatrix> ops;
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  for (double x : w) ops.push_back(std::sqrt(x / total) * haar_unitary(d, rng));
  return KrausChannel(std::move(ops));
}

KrausChannel random_nonunital_channel(int num_qubits, Rng& rng, int kraus_rank) {
  if (kraus_rank < 2) throw PreconditionError("non-unital channel needs Kraus rank >= 2");
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  while (true) {
    const CMatrix v = haar_isometry(d * kraus_rank, d, rng);
    std::vector<CMatrix> ops;
    for (int a = 0; a < kraus_rank; ++a) ops.push_back(v.middleRows(a * d, d));
    KrausChannel ch(std::move(ops));
    if (validate_kraus(ch).unital_residual >= 1e-6) return ch;
  }
}

KrausChannel named_channel(const std::string& name, double p) {
  if (name == "identity" || name == "none") return identity_channel(1);
  if (name == "depolarizing") return depolarizing(p);
  if (name == "amplitude_damping") return amplitude_damping(p);
  if (name == "bit_flip") return bit_flip(p);
  if (name == "phase_flip") return phase_flip(p);
  if (name == "flip_then_damp") return flip_then_damp(p);
  throw ConfigError("unknown channel name '" + name + "'");
}

}  // namespace nibp
