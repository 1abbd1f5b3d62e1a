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
#include <functional>
#include <optional>
#include <vector>

#include "nibp/circuit.hpp"
#include "nibp/hamiltonian.hpp"

namespace nibp {

using Objective = std::function<double(const RVector&)>;

/// Gains a_k = a / (k + 1 + A)^alpha and c_k = c / (k + 1)^gamma.
struct SpsaConfig {
  int maxiter = 200;
  /// Calibrated when absent so the first update moves each coordinate by
  /// about `target_step`.
  std::optional<double> a;
  double c = 0.1;
  /// Defaults to 0.1 * maxiter.
  std::optional<double> A;
  double alpha = 0.602;
  double gamma = 0.101;
  double target_step = 0.1;
  int calibration_samples = 10;
  std::uint64_t seed = 0;

  /// PreconditionError on violated invariants.
  void validate() const;
  double stability() const { return A.value_or(0.1 * maxiter); }
};

struct TrainTrace {
  /// (f(theta_k + c_k D) + f(theta_k - c_k D)) / 2.
  std::vector<double> cost;
  /// Running minimum over every evaluated point.
  std::vector<double> best_cost;
  /// ||a_k g_k||.
  std::vector<double> step_size;
  /// Best evaluated point, including the final iterate.
  RVector theta;
  double final_cost = 0.0;
  double gain_a = 0.0;
  /// Objective calls of the iterations and the final evaluation:
  /// 2 * iterations + 1 unless aborted.
  int evaluations = 0;
  int calibration_evaluations = 0;
  bool aborted = false;

  int iterations() const { return static_cast<int>(cost.size()); }
};

/// Simultaneous-perturbation stochastic approximation with Rademacher
/// directions. A non-finite objective value stops the run and returns the
/// trace so far with `aborted` set.
TrainTrace spsa_minimize(const Objective& objective, const RVector& theta0, const SpsaConfig& cfg);

/// theta0 uniform in [0, 2pi) from `seed`.
RVector initial_angles(std::size_t count, std::uint64_t seed);

/// Minimizes Tr(H rho(theta)) from |0...0> starting at initial_angles(cfg.seed).
TrainTrace train_circuit(const Circuit& circ, const NoiseSpec& noise, const Hamiltonian& h,
                         const SpsaConfig& cfg);

}  // namespace nibp
