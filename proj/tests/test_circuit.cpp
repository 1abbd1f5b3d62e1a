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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nibp/circuit.hpp"
#include "oracles.hpp"

using namespace nibp;

namespace {

RVector random_angles(std::size_t count, Rng& rng) {
  RVector t(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = uniform(rng, 0.0, 2 * std::numbers::pi);
  return t;
}

std::vector<double> as_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("build_two_local shape") {
  const Circuit c35 = build_two_local(3, 5);
  CHECK(c35.num_parameters() == 15);
  CHECK(c35.count_gates("cnot") == 10);
  CHECK(c35.num_layers() == 5);
  const Circuit c21 = build_two_local(2, 1);
  CHECK(c21.num_parameters() == 2);
  CHECK(c21.count_gates("cnot") == 1);
  CHECK(build_two_local(3, 20).num_parameters() == 60);
  CHECK(c35.parameter_index({2, 1}) == 7);
  CHECK(c35.parameter_location(7) == GateLocation{2, 1});
  CHECK_THROWS_AS(c35.parameter_index({0, 3}), PreconditionError);
  CHECK_THROWS_AS(build_two_local(1, 3), PreconditionError);
  CHECK_THROWS_AS(build_two_local(3, 0), PreconditionError);
}

TEST_CASE("noiseless evolve matches the statevector oracle") {
  Rng rng = make_rng(31);
  CHECK((evolve(build_two_local(3, 4), RVector::Zero(12), NoiseSpec::noiseless(), zero_state(3)).matrix() -
         zero_state(3).matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  for (int n = 2; n <= 4; ++n) {
    for (int layers : {1, 3, 6}) {
      const Circuit circ = build_two_local(n, layers);
      const RVector theta = random_angles(circ.num_parameters(), rng);
      const oracle::Vec psi = oracle::two_local_state(n, layers, as_std(theta));
      const DensityMatrix out = evolve(circ, theta, NoiseSpec::noiseless(), zero_state(n));
      CHECK((out.matrix() - psi * psi.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(out.purity() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("noisy evolve matches the density-matrix oracle") {
  Rng rng = make_rng(32);
  const Circuit circ = build_two_local(3, 4);
  const RVector theta = random_angles(circ.num_parameters(), rng);
  const CMatrix ad = evolve(circ, theta, NoiseSpec::broadcast(amplitude_damping(0.3), 3), zero_state(3)).matrix();
  CHECK((ad - oracle::two_local_noisy(3, 4, as_std(theta), oracle::amplitude_damping(0.3))).cwiseAbs().maxCoeff() <
        1e-10);
  const CMatrix dep = evolve(circ, theta, NoiseSpec::broadcast(depolarizing(0.2), 3), zero_state(3)).matrix();
  CHECK((dep - oracle::two_local_noisy(3, 4, as_std(theta), oracle::depolarizing(0.2))).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("single rotation followed by depolarizing") {
  const NiceBasis b = build_nice_basis(1);
  Circuit circ(1);
  circ.add_rotation(0, PauliLetter::Y);
  for (double p : {0.0, 0.3, 0.6}) {
    for (double th : {0.0, 0.7, 2.9}) {
      RVector theta(1);
      theta << th;
      const DensityMatrix out = evolve(circ, theta, NoiseSpec::broadcast(depolarizing(p), 1), zero_state(1));
      const RVector v = to_coherence(out, b).values();
      CHECK(v(2) == doctest::Approx((1 - 4 * p / 3) * std::cos(th) / std::sqrt(2.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("amplitude damping drives purity toward the ground state") {
  Rng rng = make_rng(33);
  const NoiseSpec noise = NoiseSpec::broadcast(amplitude_damping(0.3), 3);
  double previous = 0.0;
  for (int layers = 1; layers <= 8; ++layers) {
    const Circuit circ = build_two_local(3, layers);
    const RVector theta = random_angles(circ.num_parameters(), rng);
    const DensityMatrix warm = evolve(circ, theta, noise, zero_state(3));
    CHECK(warm.purity() <= 1.0 + 1e-12);
    // At theta = 0 the gates fix |000>, the attractor of the damping.
    const DensityMatrix cold = evolve(circ, RVector::Zero(theta.size()), noise, random_mixed_state(3, rng));
    CHECK(cold.purity() > previous);
    previous = cold.purity();
  }
}

TEST_CASE("perturbed gates") {
  const Gate ry = Gate::rotation(PauliString::parse("Y"));
  const Gate same = perturbed_gate(ry, {{PauliString::parse("X"), 0.0}});
  CHECK_FALSE(same.perturbed());
  CHECK((same.local_unitary(0.4) - ry.local_unitary(0.4)).cwiseAbs().maxCoeff() == 0.0);

  const double a = 0.1;
  const Gate over = perturbed_gate(ry, {{PauliString::parse("Y"), a}});
  for (double th : {0.3, 1.7, -2.2}) {
    CHECK((over.local_unitary(th) - ry.local_unitary(th * (1 + a))).cwiseAbs().maxCoeff() < 1e-12);
  }
  const Gate tilted = perturbed_gate(ry, {{PauliString::parse("X"), 0.1}});
  for (double th : {0.3, 1.7}) {
    const oracle::Mat g = oracle::pauli('Y') + 0.1 * oracle::pauli('X');
    const oracle::Mat expected = (oracle::C(0, -th / 2) * g).exp();
    CHECK((tilted.local_unitary(th) - expected).cwiseAbs().maxCoeff() < 1e-12);
    const CMatrix u = tilted.local_unitary(th);
    CHECK((u.adjoint() * u - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Perturbation reaching a qubit outside the generator's support.
  const Gate wide = perturbed_gate(Gate::rotation(PauliString::parse("YII")),
                                   {{PauliString::parse("IZX"), 0.05}, {PauliString::parse("XII"), -0.04}});
  CHECK(wide.targets() == std::vector<int>{0, 1, 2});
  const double th = 0.9;
  const oracle::Mat g = oracle::pauli_string("YII") + 0.05 * oracle::pauli_string("IZX") -
                        0.04 * oracle::pauli_string("XII");
  CHECK((wide.unitary(th) - (oracle::C(0, -th / 2) * g).exp()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(perturbed_gate(ry, {{PauliString::parse("X"), 0.15}, {PauliString::parse("Z"), 0.15}}),
                  PreconditionError);
  Circuit circ(2);
  circ.add_cnot(0, 1);
  CHECK_THROWS_AS(perturbed_gate(circ.gate({0, 0}), {}), PreconditionError);
  CHECK(perturbation_norm({{PauliString::parse("XI"), 0.1}, {PauliString::parse("ZI"), 0.1}}) ==
        doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("random_unitary_channel") {
  const NiceBasis b = build_nice_basis(1);
  const UnitaryMixture ideal{{{1.0, PauliString::parse("Y")}}, 0};
  const KrausChannel ch = random_unitary_channel(ideal, 0.8);
  const oracle::Mat u = oracle::ry(0.8);
  CHECK((ch.apply(oracle::pauli('X')) - u * oracle::pauli('X') * u.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

  const UnitaryMixture mix{{{0.9, PauliString::parse("Y")}, {0.1, PauliString::parse("X")}}, 0};
  const AffineRep rep = affine_rep(random_unitary_channel(mix, 1.1), b);
  CHECK(rep.c.norm() < 1e-15);
  CHECK(validate_kraus(random_unitary_channel(mix, 1.1)).unital);

  const AffineRep zero = affine_rep(random_unitary_channel(mix, 0.0), b);
  CHECK((zero.M - RMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(random_unitary_channel({{{0.9, PauliString::parse("Y")}, {0.2, PauliString::parse("X")}}, 0}, 0.1),
                  PreconditionError);
}

TEST_CASE("gate noise inside evolve matches explicit channels") {
  Rng rng = make_rng(34);
  const Circuit circ = build_two_local(2, 2);
  const RVector theta = random_angles(4, rng);
  NoiseSpec noise;
  const UnitaryMixture mix{{{0.85, PauliString::parse("YI")}, {0.1, PauliString::parse("XI")}, {0.05, PauliString::parse("IZ")}}, 0};
  noise.set_mixture({1, 0}, mix);
  const std::vector<PauliTerm> a{{PauliString::parse("ZX"), 0.05}, {PauliString::parse("IY"), 0.03}};
  noise.set_control({0, 1}, a);

  // Oracle: full-dimension matrices for every gate.
  const auto u_at = [&](int l, int q) { return oracle::one_qubit(oracle::ry(theta(l * 2 + q)), q, 2); };
  const oracle::Mat cx = oracle::cnot(0, 1, 2);
  oracle::Mat rho = oracle::Mat::Zero(4, 4);
  rho(0, 0) = 1;
  const oracle::Mat g = oracle::pauli_string("IY") + 0.05 * oracle::pauli_string("ZX") + 0.03 * oracle::pauli_string("IY");
  const oracle::Mat u_pert = (oracle::C(0, -theta(1) / 2) * g).exp();
  oracle::Mat u0 = cx * u_pert * u_at(0, 0);
  rho = u0 * rho * u0.adjoint();
  const KrausChannel mixed = random_unitary_channel(mix, theta(2));
  rho = oracle::kraus_apply({mixed.kraus_ops().begin(), mixed.kraus_ops().end()}, rho);
  oracle::Mat u1 = cx * u_at(1, 1);
  rho = u1 * rho * u1.adjoint();

  const CMatrix out = evolve_matrix(circ, theta, noise, zero_state(2).matrix());
  CHECK((out - rho).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(noise.set_control({1, 0}, a), PreconditionError);
  CHECK_THROWS_AS(noise.set_control({1, 1}, {{PauliString::parse("ZZ"), 0.25}}), PreconditionError);
  NoiseSpec wrong;
  wrong.set_mixture({0, 0}, {{{1.0, PauliString::parse("XI")}}, 0});
  CHECK_THROWS_AS(evolve_matrix(circ, theta, wrong, zero_state(2).matrix()), PreconditionError);
}

TEST_CASE("prefix and suffix compose to the full evolution") {
  Rng rng = make_rng(35);
  const Circuit circ = build_two_local(3, 3);
  const RVector theta = random_angles(9, rng);
  const NoiseSpec noise = NoiseSpec::broadcast(amplitude_damping(0.2), 3);
  const CMatrix full = evolve_matrix(circ, theta, noise, zero_state(3).matrix());
  for (const GateLocation loc : {GateLocation{0, 0}, GateLocation{1, 2}, GateLocation{2, 4}}) {
    const CMatrix before = evolve_prefix(circ, theta, noise, zero_state(3).matrix(), loc);
    const double th = circ.gate(loc).parameterized() ? theta(static_cast<Eigen::Index>(circ.parameter_index(loc))) : 0;
    const CMatrix after = evolve_suffix(circ, theta, noise, apply_noisy_gate(circ, loc, th, noise, before), loc);
    CHECK((after - full).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(evolve_matrix(circ, RVector::Zero(8), noise, zero_state(3).matrix()), DimensionError);
}

TEST_CASE("trace and Hermiticity after every layer on random configurations") {
  Rng rng = make_rng(36);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const int layers = 1 + trial % 5;
    const Circuit circ = build_two_local(n, layers);
    const RVector theta = random_angles(circ.num_parameters(), rng);
    NoiseSpec noise;
    LayerNoise layer_noise;
    for (int q = 0; q < n; ++q) {
      layer_noise.push_back({(trial + q) % 2 ? random_nonunital_channel(1, rng) : random_unital_channel(1, rng), {q}});
    }
    if (trial % 4 == 0) layer_noise.push_back({random_nonunital_channel(2, rng), {0, n - 1}});
    noise.set_default_layer(layer_noise);
    noise.set_control({0, 0}, random_control_noise(n, rng));
    const auto states = trajectory(circ, theta, noise, random_mixed_state(n, rng).matrix());
    for (const CMatrix& rho : states) {
      CHECK(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-10);
      CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(min_eigenvalue(rho) > -1e-9);
    }
  }
}

TEST_CASE("identity layer noise keeps evolution unitary") {
  Rng rng = make_rng(37);
  const Circuit circ = build_two_local(3, 6);
  const DensityMatrix rho0 = random_mixed_state(3, rng);
  const DensityMatrix out = evolve(circ, random_angles(18, rng), NoiseSpec::broadcast(identity_channel(1), 3), rho0);
  CHECK(out.purity() == doctest::Approx(rho0.purity()).epsilon(1e-10));
}

TEST_CASE("coherence-vector evolution through per-layer affine maps") {
  Rng rng = make_rng(38);
  for (int n = 1; n <= 3; ++n) {
    const NiceBasis b = build_nice_basis(n);
    Circuit circ(n);
    for (int l = 0; l < 4; ++l) {
      circ.add_layer();
      for (int q = 0; q < n; ++q) circ.add_rotation(q, PauliLetter::Y);
      for (int q = 0; q + 1 < n; ++q) circ.add_cnot(q, q + 1);
    }
    NoiseSpec noise = NoiseSpec::broadcast(amplitude_damping(0.25), n);
    noise.set_layer(2, broadcast_layer(depolarizing(0.1), n));
    const RVector theta = random_angles(circ.num_parameters(), rng);
    const DensityMatrix rho0 = random_mixed_state(n, rng);
    RVector v = to_coherence(rho0, b).values();
    const auto states = trajectory(circ, theta, noise, rho0.matrix());
    for (int l = 0; l < circ.num_layers(); ++l) {
      v = affine_rep(layer_map(circ, theta, noise, l), b).apply(v);
      CHECK((v - coherence_coordinates(states[static_cast<std::size_t>(l + 1)], b)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("noise spec unitality and random control noise") {
  CHECK(NoiseSpec::broadcast(depolarizing(0.3), 3).unital(5));
  CHECK_FALSE(NoiseSpec::broadcast(amplitude_damping(0.3), 3).unital(5));
  NoiseSpec mixed = NoiseSpec::broadcast(depolarizing(0.3), 2);
  mixed.set_layer(7, broadcast_layer(amplitude_damping(0.1), 2));
  CHECK(mixed.unital(7));
  CHECK_FALSE(mixed.unital(8));

  Rng r1 = make_rng(39), r2 = make_rng(39);
  const auto a1 = random_control_noise(4, r1);
  const auto a2 = random_control_noise(4, r2);
  REQUIRE(a1.size() == 3);
  for (std::size_t i = 0; i < a1.size(); ++i) {
    CHECK(a1[i].pauli == a2[i].pauli);
    CHECK(a1[i].coeff == a2[i].coeff);
    CHECK(std::abs(a1[i].coeff) <= 0.05);
    CHECK(a1[i].pauli.hamming_weight() >= 1);
    CHECK(a1[i].pauli.hamming_weight() <= 2);
  }
  CHECK(perturbation_norm(a1) < kMaxPerturbationNorm);
}
