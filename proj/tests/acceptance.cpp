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


// Acceptance run: one PASS/FAIL line per criterion at desk scale. Exit code 0
// means every criterion was evaluated; --strict also requires every PASS.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nibp/bounds.hpp"
#include "nibp/experiment.hpp"
#include "nibp/gradient.hpp"
#include "oracles.hpp"

using namespace nibp;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  const char* id;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* pattern, double a) {
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), pattern, a);
  return buffer;
}

std::vector<std::string> nice_names(int n) {
  std::vector<std::string> names;
  const NiceBasis basis = build_nice_basis(n);
  for (std::size_t j = 1; j < basis.size(); ++j) names.push_back(basis.string(j).str());
  return names;
}

Circuit any_circuit(int n, int layers) {
  if (n >= 2) return build_two_local(n, layers);
  Circuit c(1);
  for (int l = 0; l < layers; ++l) {
    c.add_layer();
    c.add_rotation(0, PauliLetter::Y);
  }
  return c;
}

Hamiltonian any_hamiltonian(int n, std::uint64_t seed) {
  if (n >= 2) return random_two_local(n, seed);
  Rng rng = make_rng(seed);
  return Hamiltonian(1, {{PauliString::parse("X"), uniform(rng, -1, 1)}, {PauliString::parse("Z"), uniform(rng, -1, 1)}},
                     uniform(rng, -1, 1));
}

double spectral_norm(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<RMatrix>(m).singularValues()(0);
}

Outcome affine_oracle() {
  Rng rng = make_rng(1001);
  double worst = 0.0;
  int channels = 0;
  for (int n = 1; n <= 3; ++n) {
    const NiceBasis basis = build_nice_basis(n);
    const auto names = nice_names(n);
    for (int k = 0; k < 100; ++k, ++channels) {
      KrausChannel ch = k % 3 == 0   ? random_unital_channel(n, rng, 2 + k % 2)
                        : k % 3 == 1 ? random_nonunital_channel(n, rng, 2 + k % 3)
                                     : haar_unitary_channel(n, rng);
      const AffineRep rep = affine_rep(ch, basis);
      const std::vector<oracle::Mat> ks(ch.kraus_ops().begin(), ch.kraus_ops().end());
      for (int s = 0; s < 3; ++s) {
        const CMatrix rho = random_mixed_state(n, rng, 1 + s).matrix();
        const Eigen::VectorXd expected = oracle::coords(oracle::kraus_apply(ks, rho), names);
        worst = std::max(worst, (rep.apply(oracle::coords(rho, names)) - expected).cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst <= 1e-10, std::to_string(channels) + " channels, max |Mv+c - v_kraus| = " + fmt("%.3g", worst) +
                              " (tol 1e-10)"};
}

Outcome channel_values() {
  const NiceBasis basis = build_nice_basis(1);
  const auto names = nice_names(1);
  const auto index = [&](const char* s) {
    return static_cast<Eigen::Index>(std::find(names.begin(), names.end(), s) - names.begin());
  };
  const Eigen::Index x = index("X"), y = index("Y"), z = index("Z");
  double worst = 0.0;
  for (double p : {0.1, 0.36, 0.8}) {
    const AffineRep ad = affine_rep(amplitude_damping(p), basis).in_convention(ShiftConvention::kBloch);
    RMatrix m_expected = RMatrix::Zero(3, 3);
    m_expected(x, x) = std::sqrt(1 - p);
    m_expected(y, y) = std::sqrt(1 - p);
    m_expected(z, z) = 1 - p;
    RVector c_expected = RVector::Zero(3);
    c_expected(z) = p;
    worst = std::max({worst, (ad.M - m_expected).cwiseAbs().maxCoeff(), (ad.c - c_expected).cwiseAbs().maxCoeff()});

    const AffineRep composite = affine_rep(flip_then_damp(p), basis);
    RMatrix composite_expected = RMatrix::Zero(3, 3);
    composite_expected(x, x) = std::sqrt(1 - p);
    worst = std::max(worst, (composite.M - composite_expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max entry error " + fmt("%.3g", worst) + " (tol 1e-12)"};
}

Outcome lemma_suite() {
  Rng rng = make_rng(1003);
  int purity_violations = 0, shift_violations = 0, norm_violations = 0, contraction_violations = 0;
  double worst_shift = 0.0, largest_nonunital = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 3;
    const NiceBasis basis = build_nice_basis(n);
    const KrausChannel ch = random_unital_channel(n, rng, 2 + k % 3);
    const DensityMatrix rho = random_mixed_state(n, rng, 1 + k % 2);
    const DensityMatrix out(n, ch.apply(rho.matrix()));
    if (out.purity() > rho.purity() + 1e-12) ++purity_violations;
    const AffineRep rep = affine_rep(ch, basis);
    worst_shift = std::max(worst_shift, rep.c.norm());
    if (rep.c.norm() > 1e-9) ++shift_violations;
    const RVector v = coherence_coordinates(rho.matrix(), basis);
    if ((rep.M * v).norm() > v.norm() + 1e-12) ++norm_violations;
  }
  const NiceBasis one = build_nice_basis(1);
  for (int k = 0; k < 1000; ++k) {
    const AffineRep rep = affine_rep(random_nonunital_channel(1, rng, 2 + k % 3), one);
    const double s = spectral_norm(rep.M);
    largest_nonunital = std::max(largest_nonunital, s);
    if (!(s < 1.0)) ++contraction_violations;
  }
  const int total = purity_violations + shift_violations + norm_violations + contraction_violations;
  return {total == 0, "violations purity/shift/norm/contraction = " + std::to_string(purity_violations) + "/" +
                          std::to_string(shift_violations) + "/" + std::to_string(norm_violations) + "/" +
                          std::to_string(contraction_violations) + ", max unital ||c|| " + fmt("%.3g", worst_shift) +
                          ", max non-unital ||M|| " + fmt("%.6f", largest_nonunital)};
}

Outcome psr_correctness() {
  Rng rng = make_rng(1004);
  const char* letters = "XYZ";
  double worst = 0.0;
  std::map<int, int> per_model;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 3;
    const int layers = 1 + static_cast<int>(rng() % 6);
    const Circuit circ = any_circuit(n, layers);
    const Hamiltonian h = any_hamiltonian(n, 5000 + static_cast<std::uint64_t>(k));
    const GateLocation loc = circ.parameter_location(rng() % circ.num_parameters());
    const double p = uniform(rng, 0.05, 0.5);
    const int model = (k / 3) % 4;
    NoiseSpec noise = NoiseSpec::broadcast(model == 1 ? amplitude_damping(p) : depolarizing(model == 0 ? p : 0.1 * p), n);
    if (model == 2) noise.set_control(loc, random_control_noise(n, rng));
    if (model == 3) {
      std::string other(static_cast<std::size_t>(n), 'I');
      other[rng() % static_cast<std::size_t>(n)] = letters[rng() % 3];
      const double q = uniform(rng, 0.0, 0.3);
      noise.set_mixture(loc, {{{1 - q, circ.gate(loc).generator()}, {q, PauliString::parse(other)}}, 0});
    }
    const RVector theta = random_angles(circ.num_parameters(), rng);
    worst = std::max(worst, std::abs(psr_gradient(circ, theta, noise, h, loc) - fd_gradient(circ, theta, noise, h, loc)));
    ++per_model[model];
  }
  return {worst <= 1e-6, "200 configs (" + std::to_string(per_model[0]) + " depolarizing, " +
                             std::to_string(per_model[1]) + " AD, " + std::to_string(per_model[2]) + " control, " +
                             std::to_string(per_model[3]) + " random-unitary), max |psr - fd| = " + fmt("%.3g", worst) +
                             " (tol 1e-6)"};
}

// One layers sweep serves both the unital and the damping criteria.
const ExperimentResult& layers_sweep() {
  static const ExperimentResult result = run_experiment(parse_experiment_config(Json{{"preset", "layers_sweep"}}));
  return result;
}

std::vector<std::size_t> rows_where(const Table& t, const std::string& noise, const std::string& location) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.cell(i, "noise") == noise && (location.empty() || t.cell(i, "location") == location)) out.push_back(i);
  return out;
}

Outcome unital_decay() {
  const Table& t = layers_sweep().table;
  bool pass = true;
  std::string detail;
  for (const char* location : {"first", "middle", "last"}) {
    std::vector<double> x, y;
    bool bounded = true;
    double slope_limit = 0.0;
    for (std::size_t i : rows_where(t, "depolarizing", location)) {
      bounded = bounded && t.number(i, "max_ratio") <= t.number(i, "bound_factor") * (1 + 1e-12);
      x.push_back(t.number(i, "L"));
      y.push_back(std::log10(t.number(i, "mean_abs")));
      slope_limit = -0.8 * std::log10(1.0 / t.number(i, "r_channel"));
    }
    const double slope = fit_slope(x, y);
    pass = pass && bounded && slope <= slope_limit;
    detail += std::string(location) + ": slope " + fmt("%.4f", slope) + " (<= " + fmt("%.4f", slope_limit) +
              "), max<=|h|r^L " + (bounded ? "yes" : "no") + "; ";
  }
  return {pass, detail};
}

Outcome damping_plateau() {
  const Table& t = layers_sweep().table;
  double at6 = std::nan(""), at24 = std::nan(""), bound24 = std::nan("");
  for (std::size_t i : rows_where(t, "amplitude_damping", "last")) {
    if (t.number(i, "L") == 6) at6 = t.number(i, "mean_abs");
    if (t.number(i, "L") == 24) {
      at24 = t.number(i, "mean_abs");
      bound24 = t.number(i, "bound");
    }
  }
  const double ratio = at24 / at6;
  const bool flat = ratio >= 0.5 && ratio <= 2.0;
  const bool exceeds = at24 > bound24;
  return {flat && exceeds, "last-layer mean L=6 " + fmt("%.4g", at6) + ", L=24 " + fmt("%.4g", at24) + " (ratio " +
                               fmt("%.3f", ratio) + ", need [0.5, 2]); |h|r^24 = " + fmt("%.4g", bound24) +
                               " with r = " + fmt("%.4f", t.number(rows_where(t, "amplitude_damping", "last")[0], "r_channel"))};
}

Outcome limit_set() {
  const ExperimentResult result = run_experiment(parse_experiment_config(
      Json{{"preset", "final_cost"}, {"n", 3}, {"L", 5}, {"p", 0.45}, {"instances", 10}, {"spsa", {{"maxiter", 200}}}}));
  const Table& t = result.table;
  double gap_dep = std::nan(""), gap_ad = std::nan("");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double gap = std::abs(t.number(i, "mean_final_cost") - t.number(i, "mean_trace_over_dim"));
    if (t.cell(i, "noise") == "depolarizing") gap_dep = gap;
    if (t.cell(i, "noise") == "amplitude_damping") gap_ad = gap;
  }
  return {gap_dep <= 0.05 && gap_ad > 0.05, "|mean final - Tr(H)/8|: depolarizing " + fmt("%.4f", gap_dep) +
                                                " (need <= 0.05), AD " + fmt("%.4f", gap_ad) + " (need > 0.05)"};
}

Outcome shift_radius() {
  Rng rng = make_rng(1008);
  int violations = 0;
  double tightest = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 3;
    const int layers = 1 + static_cast<int>(rng() % 12);
    const Circuit circ = any_circuit(n, layers);
    NoiseSpec noise;
    for (int l = 0; l < layers; ++l) {
      const double p = uniform(rng, 0.05, 0.6);
      const int pick = static_cast<int>(rng() % 3);
      noise.set_layer(l, broadcast_layer(pick == 0   ? depolarizing(p)
                                         : pick == 1 ? phase_flip(1 - p)
                                                     : amplitude_damping(p),
                                         n));
    }
    const Hamiltonian h = any_hamiltonian(n, 8000 + static_cast<std::uint64_t>(k));
    const auto acc = shift_accumulator(circ, noise, random_angles(circ.num_parameters(), rng), h, layers);
    if (std::abs(acc.d_dot_h) > acc.lambda) ++violations;
    if (acc.lambda > 0) tightest = std::max(tightest, std::abs(acc.d_dot_h) / acc.lambda);
  }
  return {violations == 0, std::to_string(violations) + " violations in 100 circuits, max |d.h|/Lambda = " +
                               fmt("%.4f", tightest)};
}

Outcome width_scaling() {
  const ExperimentResult result = run_experiment(parse_experiment_config(Json{{"preset", "width_scaling"}, {"p", 0.3}}));
  const Table& t = result.table;
  bool pass = true;
  std::map<std::string, std::map<int, double>> worst;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double ratio = t.number(i, "mean_abs") / t.number(i, "reference");
    pass = pass && ratio >= 1.0 / 3.0 && ratio <= 3.0;
    double& w = worst[t.cell(i, "noise")][static_cast<int>(t.number(i, "n"))];
    const double factor = std::max(ratio, 1.0 / ratio);
    w = std::max(w, factor);
  }
  std::string detail = "worst factor to |h|/sqrt(D) (need <= 3):";
  for (const auto& [noise, by_n] : worst) {
    detail += " " + noise + " [";
    for (const auto& [n, f] : by_n) detail += " n=" + std::to_string(n) + ":" + fmt("%.1f", f);
    detail += " ]";
  }
  return {pass, detail};
}

Outcome determinism() {
  ExperimentConfig cfg = parse_experiment_config(
      Json{{"preset", "noise_sweep"}, {"L", 8}, {"instances", 3}, {"theta_samples", 5}, {"seed", 77}});
  const std::string first = run_experiment(cfg).table.to_csv();
  const std::string again = run_experiment(cfg).table.to_csv();
  cfg.threads = 1;
  const std::string serial = run_experiment(cfg).table.to_csv();
  const auto trained = parse_experiment_config(
      Json{{"preset", "final_cost"}, {"n", 2}, {"L", 3}, {"p", 0.2}, {"instances", 3}, {"spsa", {{"maxiter", 30}}}});
  const bool same_training = run_experiment(trained).table.to_csv() == run_experiment(trained).table.to_csv();
  const bool pass = first == again && first == serial && same_training;
  return {pass, std::string("gradient csv rerun ") + (first == again ? "identical" : "differs") + ", threads=1 " +
                    (first == serial ? "identical" : "differs") + ", training csv rerun " +
                    (same_training ? "identical" : "differs") + " (" + std::to_string(first.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<Criterion> criteria{
      {"AC1", 30, affine_oracle},     {"AC2", 1, channel_values},    {"AC3", 120, lemma_suite},
      {"AC4", 300, psr_correctness},  {"AC5", 1200, unital_decay},   {"AC6", 1200, damping_plateau},
      {"AC7", 900, limit_set},        {"AC8", 300, shift_radius},    {"AC9", 1800, width_scaling},
      {"AC10", 60, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      std::printf("%-4s ERROR %s\n", c.id, e.what());
      return 2;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.limit_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failures;
    std::printf("%-4s %s  %s  [%.1f s, limit %.0f s]\n", c.id, pass ? "PASS" : "FAIL", outcome.detail.c_str(), seconds,
                c.limit_seconds);
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu criteria evaluated, %d failed\n", criteria.size(), failures);
  return strict && failures > 0 ? 1 : 0;
}
