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


#include "nibp/trainer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nibp/random.hpp"

namespace nibp {

namespace {

RVector rademacher(Eigen::Index size, Rng& rng) {
  RVector delta(size);
  for (Eigen::Index i = 0; i < size; ++i) delta(i) = (rng() & 1U) ? 1.0 : -1.0;
  return delta;
}

double calibrate(const Objective& objective, const RVector& theta0, const SpsaConfig& cfg,
                 TrainTrace& trace) {
  Rng rng = make_rng(cfg.seed, {1});
  double total = 0.0;
  int used = 0;
  for (int s = 0; s < cfg.calibration_samples; ++s) {
    const RVector delta = rademacher(theta0.size(), rng);
    const double plus = objective(theta0 + cfg.c * delta);
    const double minus = objective(theta0 - cfg.c * delta);
    trace.calibration_evaluations += 2;
    if (!std::isfinite(plus) || !std::isfinite(minus)) continue;
    total += std::abs(plus - minus) / (2.0 * cfg.c);
    ++used;
  }
  const double scale = std::pow(1.0 + cfg.stability(), cfg.alpha);
  const double magnitude = used > 0 ? total / used : 0.0;
  if (magnitude < 1e-12) return cfg.target_step * scale;
  return cfg.target_step * scale / magnitude;
}

}  // namespace

void SpsaConfig::validate() const {
  if (maxiter < 1) throw PreconditionError("maxiter must be at least 1");
  if (!(c > 0.0)) throw PreconditionError("perturbation size c must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("alpha must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("gamma must lie in (0, 1]");
  if (a && !(*a > 0.0)) throw PreconditionError("gain a must be positive");
  if (stability() < 0.0) throw PreconditionError("stability constant A must be non-negative");
  if (!a && calibration_samples < 1) throw PreconditionError("calibration needs at least one sample");
  if (!(target_step > 0.0)) throw PreconditionError("target step must be positive");
}

TrainTrace spsa_minimize(const Objective& objective, const RVector& theta0, const SpsaConfig& cfg) {
  cfg.validate();
  TrainTrace trace;
  trace.gain_a = cfg.a ? *cfg.a : calibrate(objective, theta0, cfg, trace);
  const double big_a = cfg.stability();

  Rng rng = make_rng(cfg.seed, {0});
  RVector theta = theta0;
  RVector best_theta = theta0;
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](const RVector& point, double value) {
    if (value < best) {
      best = value;
      best_theta = point;
    }
  };

  for (int k = 0; k < cfg.maxiter; ++k) {
    const double ak = trace.gain_a / std::pow(k + 1.0 + big_a, cfg.alpha);
    const double ck = cfg.c / std::pow(k + 1.0, cfg.gamma);
    const RVector delta = rademacher(theta.size(), rng);
    const RVector plus_point = theta + ck * delta;
    const RVector minus_point = theta - ck * delta;
    const double plus = objective(plus_point);
    const double minus = objective(minus_point);
    trace.evaluations += 2;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      trace.aborted = true;
      break;
    }
    consider(plus_point, plus);
    consider(minus_point, minus);
    // Rademacher entries are their own inverses.
    const RVector step = ak * (plus - minus) / (2.0 * ck) * delta;
    theta -= step;
    trace.cost.push_back(0.5 * (plus + minus));
    trace.best_cost.push_back(best);
    trace.step_size.push_back(step.norm());
  }

  if (!trace.aborted) {
    const double last = objective(theta);
    ++trace.evaluations;
    if (std::isfinite(last)) {
      consider(theta, last);
    } else {
      trace.aborted = true;
    }
  }
  trace.theta = best_theta;
  trace.final_cost = best;
  return trace;
}

RVector initial_angles(std::size_t count, std::uint64_t seed) {
  Rng rng = make_rng(seed, {2});
  RVector t(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return t;
}

TrainTrace train_circuit(const Circuit& circ, const NoiseSpec& noise, const Hamiltonian& h,
                         const SpsaConfig& cfg) {
  if (h.num_qubits() != circ.num_qubits()) throw DimensionError("Hamiltonian and circuit widths differ");
  const CMatrix rho0 = zero_state(circ.num_qubits()).matrix();
  const Objective objective = [&](const RVector& theta) {
    return cost(h, evolve_matrix(circ, theta, noise, rho0));
  };
  return spsa_minimize(objective, initial_angles(circ.num_parameters(), cfg.seed), cfg);
}

}  // namespace nibp
