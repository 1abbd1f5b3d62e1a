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


// nibp-lab: channel inspection, gradient scans, bound reports, training and
// preset experiments driven by JSON configs.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "nibp/bounds.hpp"
#include "nibp/config.hpp"
#include "nibp/experiment.hpp"
#include "nibp/gradient.hpp"
#include "nibp/random.hpp"
#include "nibp/trainer.hpp"

namespace fs = std::filesystem;
using namespace nibp;

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool force = false;
};

constexpr std::uint64_t kThetaStream = 2;

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where + " config");
  }
}

Json load(const CommonOptions& opts) {
  Json j = read_json_file(opts.config);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (opts.seed) j["seed"] = *opts.seed;
  if (opts.threads) j["threads"] = *opts.threads;
  return j;
}

fs::path out_dir(const CommonOptions& opts, const Json& j) {
  if (!opts.out.empty()) return opts.out;
  if (j.contains("output")) return j.at("output").get<std::string>();
  throw ConfigError("no output directory: pass --out or set \"output\"");
}

template <typename T>
T value_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

// The fixed-circuit problem shared by bound-report and train.
struct Problem {
  int n;
  int layers;
  double p;
  NoiseModel model;
  std::uint64_t seed;
  int instance;
  Circuit circuit{1};
  NoiseSpec noise;
  Hamiltonian hamiltonian{1, {}};
};

Problem parse_problem(const Json& j) {
  Problem pr;
  pr.n = value_or(j, "n", 3);
  pr.layers = value_or(j, "L", 5);
  pr.p = value_or(j, "p", 0.3);
  pr.seed = value_or<std::uint64_t>(j, "seed", 0);
  pr.instance = value_or(j, "instance", 0);
  const auto models = j.contains("noise_type") ? parse_noise(j) : std::vector<NoiseModel>{NoiseModel{}};
  if (models.size() != 1) throw ConfigError("exactly one noise_type expected");
  pr.model = models.front();
  if (pr.n < 2 || pr.n > 9) throw ConfigError("n must lie in 2..9");
  if (pr.layers < 1) throw ConfigError("L must be at least 1");
  if (!(pr.p >= 0.0 && pr.p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  if (pr.instance < 0) throw ConfigError("instance must be non-negative");
  pr.circuit = build_two_local(pr.n, pr.layers);
  pr.noise = NoiseSpec::broadcast(pr.model.channel(pr.p), pr.n);
  pr.hamiltonian = hamiltonian_instance(pr.n, pr.instance, pr.seed);
  return pr;
}

int run_channel(const CommonOptions& opts) {
  const Json j = load(opts);
  check_keys(j, {"noise_type", "custom_channel", "p", "qubits", "seed", "threads", "output"}, "channel");
  const auto models = j.contains("noise_type") ? parse_noise(j) : std::vector<NoiseModel>{NoiseModel{}};
  if (models.size() != 1) throw ConfigError("exactly one noise_type expected");
  const double p = value_or(j, "p", 0.3);
  const int qubits = value_or(j, "qubits", 1);
  if (qubits < 1 || qubits > kMaxAffineQubits) throw ConfigError("qubits must lie in 1..3");
  const KrausChannel single = models.front().channel(p);
  const KrausChannel channel = tensor_channel(std::vector<KrausChannel>(static_cast<std::size_t>(qubits), single));

  const KrausValidation check = validate_kraus(channel);
  const AffineRep rep = affine_rep(channel, build_nice_basis(qubits));
  const ChannelClass cls = classify(rep);
  const PolarDecomposition polar = polar_decompose(rep);
  const Json report{{"version", version_string()},
                    {"noise_type", models.front().type},
                    {"p", p},
                    {"qubits", qubits},
                    {"kraus_count", channel.size()},
                    {"trace_residual", check.trace_residual},
                    {"unital_residual", check.unital_residual},
                    {"unital", check.unital},
                    {"M", matrix_to_json(rep.M)},
                    {"c_nice", vector_to_json(rep.c)},
                    {"c_bloch", vector_to_json(rep.in_convention(ShiftConvention::kBloch).c)},
                    {"kind", to_string(cls.kind)},
                    {"operator_norm", cls.operator_norm},
                    {"sigma_max", cls.sigma_max},
                    {"sigma_min", cls.sigma_min},
                    {"shift_norm", cls.shift_norm},
                    {"singular_values", vector_to_json(polar.singular_values)}};
  const fs::path path = out_dir(opts, j) / "channel.json";
  ensure_fresh({path}, opts.force);
  write_text(path, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_grad_scan(const CommonOptions& opts) {
  Json j = load(opts);
  check_keys(j,
             {"n", "L", "p", "noise_type", "custom_channel", "instances", "theta_samples", "seed", "threads",
              "locations", "slot", "output"},
             "grad-scan");
  const fs::path dir = out_dir(opts, j);
  j.erase("output");
  j["preset"] = "layers_sweep";
  if (!j.contains("L")) j["L"] = 8;
  const ExperimentConfig cfg = parse_experiment_config(j);
  const OutputPaths paths = output_paths(dir, "grad_scan");
  ensure_fresh({paths.csv, paths.metadata}, opts.force);
  ExperimentResult result = run_experiment(cfg);
  for (auto& row : result.table.rows) row[result.table.column("preset")] = "grad_scan";
  write_text(paths.csv, result.table.to_csv());
  const Json meta{{"version", version_string()},
                  {"config", to_json(cfg)},
                  {"rows", result.table.rows.size()},
                  {"wall_seconds", result.wall_seconds},
                  {"summary", result.summary}};
  write_text(paths.metadata, meta.dump(2) + "\n");
  std::cout << "wrote " << paths.csv.string() << " (" << result.table.rows.size() << " rows)\n";
  return 0;
}

Json escape_json(const EscapeReport& r) {
  return {{"applicable", r.applicable},
          {"bifurcation_layer", r.l},
          {"num_layers", r.num_layers},
          {"sigma_max_prefix", r.sigma_max_prefix},
          {"c_last", r.c_last},
          {"c_tilde", r.c_tilde},
          {"mu_star", r.mu_star},
          {"r_l", r.r_l},
          {"d_prev_lower", r.d_prev_lower},
          {"sigma_min_suffix", r.sigma_min_suffix},
          {"suffix_length", r.suffix_length},
          {"separation", r.separation},
          {"contracted_bound", r.contracted_bound},
          {"lower_bound", r.lower_bound},
          {"prefix_condition", r.prefix_condition},
          {"suffix_positive", r.suffix_positive},
          {"suffix_bounded", r.suffix_bounded},
          {"escapes_nibp", r.escapes_nibp}};
}

int run_bound_report(const CommonOptions& opts) {
  const Json j = load(opts);
  check_keys(j,
             {"n", "L", "p", "noise_type", "custom_channel", "seed", "threads", "instance", "l0",
              "bifurcation_layer", "suffix_cap", "output"},
             "bound-report");
  const Problem pr = parse_problem(j);
  Rng rng = make_rng(pr.seed, {kThetaStream});
  const RVector theta = random_angles(pr.circuit.num_parameters(), rng);
  const ContractivityProfile prof =
      contractivity_profile(pr.circuit, pr.noise, theta, zero_state(pr.n).matrix());
  const double h_norm = pr.hamiltonian.h_norm();

  Json curve = Json::array();
  for (int l = 0; l <= pr.layers; ++l) {
    curve.push_back({l, prof.r < 1.0 ? Json(nibp_bound(h_norm, prof.r, l)) : Json(nullptr)});
  }

  Json l0 = nullptr;
  if (prof.r > 0.0 && prof.r < 1.0) {
    const Json params = j.value("l0", Json::object());
    check_keys(params, {"c", "Q", "K"}, "l0");
    const L0Threshold t = l0_threshold(value_or(params, "c", 1.0), value_or(params, "Q", 2.0),
                                       value_or(params, "K", 2.0), prof.r);
    l0 = {{"l0", t.l0 ? Json(*t.l0) : Json(nullptr)},
          {"condition", t.condition ? Json(*t.condition) : Json(nullptr)}};
  }

  Json nils = nullptr;
  try {
    const NilsInterval interval = nils_interval(pr.circuit, pr.noise, theta, pr.hamiltonian);
    nils = {{"center", interval.center}, {"lambda_L", interval.lambda_L}, {"lambda_inf", interval.lambda_inf}};
    if (interval.d_L_dot_h) nils["d_L_dot_h"] = *interval.d_L_dot_h;
  } catch (const PreconditionError& e) {
    nils = {{"error", e.what()}};
  }

  Json escape = nullptr;
  if (pr.n <= kMaxAffineQubits && pr.layers >= 3) {
    const int l = value_or(j, "bifurcation_layer", std::max(3, pr.layers - 2));
    if (l < 3 || l > pr.layers) throw ConfigError("bifurcation_layer must lie in 3..L");
    EscapeOptions options;
    options.suffix_cap = value_or(j, "suffix_cap", 3);
    escape = escape_json(escape_report(pr.circuit, pr.noise, theta, GateLocation{l - 1, 0}, options));
  }

  const Json report{{"version", version_string()},
                    {"n", pr.n},
                    {"L", pr.layers},
                    {"noise_type", pr.model.type},
                    {"p", pr.p},
                    {"unital", pr.noise.unital(pr.layers)},
                    {"h_norm", h_norm},
                    {"r", prof.r},
                    {"r_channel", prof.r_channel},
                    {"per_layer_q", prof.q},
                    {"per_layer_opnorm", prof.opnorm},
                    {"nibp_bound_curve", curve},
                    {"L0", l0},
                    {"nils", nils},
                    {"escape", escape}};
  const fs::path path = out_dir(opts, j) / "bound_report.json";
  ensure_fresh({path}, opts.force);
  write_text(path, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_train(const CommonOptions& opts) {
  const Json j = load(opts);
  check_keys(j, {"n", "L", "p", "noise_type", "custom_channel", "seed", "threads", "instance", "spsa", "output"},
             "train");
  const Problem pr = parse_problem(j);
  SpsaConfig spsa = j.contains("spsa") ? parse_spsa(j.at("spsa")) : SpsaConfig{};
  spsa.seed = pr.seed;
  const fs::path dir = out_dir(opts, j);
  const fs::path trace_path = dir / "train_trace.csv";
  const fs::path summary_path = dir / "train_summary.json";
  ensure_fresh({trace_path, summary_path}, opts.force);

  const TrainTrace trace = train_circuit(pr.circuit, pr.noise, pr.hamiltonian, spsa);
  Table table;
  table.header = {"iter", "cost", "step_size"};
  for (int k = 0; k < trace.iterations(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    table.rows.push_back({std::to_string(k), format_number(trace.cost[i]), format_number(trace.step_size[i])});
  }
  write_text(trace_path, table.to_csv());
  const Json summary{{"version", version_string()},
                     {"n", pr.n},
                     {"L", pr.layers},
                     {"noise_type", pr.model.type},
                     {"p", pr.p},
                     {"instance", pr.instance},
                     {"spsa", to_json(spsa)},
                     {"gain_a", trace.gain_a},
                     {"final_cost", trace.final_cost},
                     {"theta", vector_to_json(trace.theta)},
                     {"evaluations", trace.evaluations},
                     {"calibration_evaluations", trace.calibration_evaluations},
                     {"aborted", trace.aborted},
                     {"trace_over_dim", pr.hamiltonian.trace_over_dim()},
                     {"ground_energy", ground_energy(pr.hamiltonian)}};
  write_text(summary_path, summary.dump(2) + "\n");
  std::cout << "final cost " << format_number(trace.final_cost) << " after " << trace.iterations()
            << " iterations; Tr(H)/d = " << format_number(pr.hamiltonian.trace_over_dim()) << "\n";
  return trace.aborted ? 1 : 0;
}

int run_experiment_command(const CommonOptions& opts) {
  Json j = load(opts);
  const fs::path dir = out_dir(opts, j);
  j.erase("output");
  const ExperimentConfig cfg = parse_experiment_config(j);
  const OutputPaths target = output_paths(dir, to_string(cfg.preset));
  ensure_fresh({target.csv, target.metadata, target.plot}, opts.force);
  const ExperimentResult result = run_experiment(cfg);
  const OutputPaths paths = write_experiment(result, cfg, dir, opts.force);
  std::cout << "wrote " << paths.csv.string() << " (" << result.table.rows.size() << " rows, "
            << format_number(result.wall_seconds) << " s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-induced barren plateau laboratory"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  CommonOptions opts;
  const auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", opts.seed, "Root seed, overrides the config");
    sub->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
    sub->add_flag("--force", opts.force, "Overwrite existing outputs");
  };
  CLI::App* channel = app.add_subcommand("channel", "Affine representation and class of a channel");
  CLI::App* grad = app.add_subcommand("grad-scan", "Gradient statistics at tracked locations");
  CLI::App* bound = app.add_subcommand("bound-report", "Contractivity, bounds and limit-set report");
  CLI::App* train = app.add_subcommand("train", "SPSA training of one instance");
  CLI::App* experiment = app.add_subcommand("experiment", "Run a preset experiment");
  for (CLI::App* sub : {channel, grad, bound, train, experiment}) add_common(sub);

  CLI11_PARSE(app, argc, argv);
  try {
    if (channel->parsed()) return run_channel(opts);
    if (grad->parsed()) return run_grad_scan(opts);
    if (bound->parsed()) return run_bound_report(opts);
    if (train->parsed()) return run_train(opts);
    if (experiment->parsed()) return run_experiment_command(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
