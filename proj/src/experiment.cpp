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


#include "nibp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>

#include "nibp/bounds.hpp"
#include "nibp/gradient.hpp"
#include "nibp/parallel.hpp"
#include "nibp/random.hpp"
#include "nibp/trainer.hpp"

#ifndef NIBP_VERSION
#define NIBP_VERSION "0.0.0-unknown"
#endif

namespace nibp {

namespace {

constexpr std::uint64_t kHamiltonianStream = 1;
constexpr std::uint64_t kThetaStream = 2;
constexpr std::uint64_t kSpsaStream = 3;
constexpr double kContractionSlack = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kGradientHeader = {
    "preset",   "noise",    "n",          "L",        "p",           "location",  "layer",
    "slot",     "instances", "samples",   "mean_abs", "var_abs",     "min_abs",   "max_abs",
    "var_signed", "max_ratio", "h_norm_mean", "r_layer", "r_channel", "bound", "bound_factor",
    "reference"};

const std::vector<std::string> kFinalCostHeader = {
    "preset",          "noise",          "n",              "L",
    "p",               "instances",      "mean_final_cost", "std_final_cost",
    "min_final_cost",  "max_final_cost", "mean_trace_over_dim", "mean_ground_energy",
    "evaluations_per_run"};

struct GradientRow {
  std::string noise;
  int n;
  int layers;
  double p;
  std::string location;
  GateLocation loc;
  GradientStats stats;
  double h_norm_mean;
  double r_layer;
  double r_channel;
  double bound;
  double bound_factor;
  double reference;
};

std::vector<double> p_values(const ExperimentConfig& cfg, const NoiseModel& model) {
  return model.parameterized() ? cfg.p : std::vector<double>{kNaN};
}

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return v.empty() ? kNaN : s.value() / static_cast<double>(v.size());
}

std::string group_key(const std::vector<std::string>& parts) {
  std::string key;
  for (const auto& p : parts) key += (key.empty() ? "" : "|") + p;
  return key;
}

Json summarize_gradients(const ExperimentConfig& cfg, const std::vector<GradientRow>& rows) {
  // Groups share every grid coordinate except the swept axis.
  struct Group {
    Json id;
    std::vector<double> x;
    std::vector<double> log_mean;
    std::vector<double> log_var;
    bool means_below_bound = true;
    bool max_within_bound = true;
    bool bound_defined = true;
    double worst_factor = 0.0;
  };
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    double x = 0.0;
    Json id{{"noise", r.noise}, {"location", r.location}};
    switch (cfg.preset) {
      case Preset::kLayersSweep:
        x = r.layers;
        id["n"] = r.n;
        id["p"] = r.p;
        break;
      case Preset::kNoiseSweep:
        x = r.p;
        id["n"] = r.n;
        id["L"] = r.layers;
        break;
      default:
        x = r.n;
        id["L"] = r.layers;
        id["p"] = r.p;
        break;
    }
    const std::string key = id.dump();
    if (!groups.count(key)) {
      order.push_back(key);
      groups[key].id = id;
    }
    Group& g = groups[key];
    g.x.push_back(cfg.preset == Preset::kTrainability || cfg.preset == Preset::kWidthScaling ? std::log10(x) : x);
    g.log_mean.push_back(std::log10(r.stats.mean_abs));
    g.log_var.push_back(std::log10(r.stats.variance_signed));
    if (std::isnan(r.bound)) {
      g.bound_defined = false;
    } else {
      g.means_below_bound = g.means_below_bound && r.stats.mean_abs <= r.bound;
      g.max_within_bound = g.max_within_bound && r.stats.max_ratio <= r.bound_factor + 1e-12;
    }
    const double factor = std::max(r.stats.mean_abs / r.reference, r.reference / r.stats.mean_abs);
    g.worst_factor = std::max(g.worst_factor, factor);
  }
  Json out = Json::array();
  std::map<std::string, double> unital_slope;
  for (const auto& key : order) {
    const Group& g = groups[key];
    Json entry = g.id;
    entry["points"] = g.x.size();
    switch (cfg.preset) {
      case Preset::kLayersSweep:
      case Preset::kNoiseSweep:
        if (g.x.size() >= 2) entry["log10_mean_slope"] = fit_slope(g.x, g.log_mean);
        if (g.bound_defined) {
          entry["means_below_bound"] = g.means_below_bound;
          entry["max_within_bound"] = g.max_within_bound;
        }
        break;
      case Preset::kWidthScaling:
        entry["worst_factor_to_reference"] = g.worst_factor;
        if (g.x.size() >= 2) entry["loglog_mean_slope"] = fit_slope(g.x, g.log_mean);
        break;
      case Preset::kTrainability:
        if (g.x.size() >= 2) {
          const double slope = fit_slope(g.x, g.log_var);
          entry["loglog_variance_slope"] = slope;
          if (g.id["noise"] == "depolarizing") {
            unital_slope[group_key({g.id["location"], g.id["L"].dump(), g.id["p"].dump()})] = slope;
          }
        }
        break;
      case Preset::kFinalCost:
        break;
    }
    out.push_back(entry);
  }
  if (cfg.preset == Preset::kTrainability) {
    for (auto& entry : out) {
      if (!entry.contains("loglog_variance_slope") || entry["noise"] == "depolarizing") continue;
      const auto it = unital_slope.find(
          group_key({entry["location"], entry["L"].dump(), entry["p"].dump()}));
      if (it != unital_slope.end()) {
        entry["decays_slower_than_unital"] = entry["loglog_variance_slope"].get<double>() > it->second;
      }
    }
  }
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("no column '" + name + "'");
}

const std::string& Table::cell(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

double Table::number(std::size_t row, const std::string& name) const {
  const std::string& text = cell(row, name);
  if (text == "nan") return kNaN;
  return std::stod(text);
}

std::string Table::to_csv() const {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buffer, sizeof(buffer), "%.*g", digits, x);
    if (std::strtod(buffer, nullptr) == x) break;
  }
  return buffer;
}

GateLocation resolve_location(const std::string& name, int num_qubits, int num_layers, int slot) {
  int layer = 0;
  if (name == "first") {
    layer = 0;
  } else if (name == "middle") {
    layer = (num_layers - 1) / 2;
  } else if (name == "last") {
    layer = num_layers - 1;
  } else if (name.rfind("suffix:", 0) == 0) {
    const std::string arg = name.substr(7);
    int distance = 0;
    if (arg == "log") {
      distance = static_cast<int>(std::ceil(std::log2(static_cast<double>(num_qubits))));
    } else if (arg == "half") {
      distance = num_layers / 2;
    } else {
      distance = std::stoi(arg);
    }
    layer = num_layers - 1 - distance;
    if (layer < 0) throw ConfigError("location '" + name + "' lies before the first layer");
  } else {
    throw ConfigError("unknown location '" + name + "'");
  }
  if (slot < 0 || slot >= num_qubits) throw ConfigError("slot outside the rotation block");
  return {layer, slot};
}

Hamiltonian hamiltonian_instance(int num_qubits, int index, std::uint64_t root_seed) {
  return random_two_local(num_qubits, split_seed(root_seed, {kHamiltonianStream,
                                                             static_cast<std::uint64_t>(num_qubits),
                                                             static_cast<std::uint64_t>(index)}));
}

double effective_dimension(int num_qubits) { return (num_qubits * num_qubits + num_qubits) / 2.0; }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("slope fit needs two or more points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw PreconditionError("slope fit needs distinct x values");
  return sxy / sxx;
}

ExperimentResult run_gradient_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<GradientRow> rows;
  std::map<int, std::vector<Hamiltonian>> instances;
  for (int n : cfg.n) {
    auto& list = instances[n];
    for (int i = 0; i < cfg.instances; ++i) list.push_back(hamiltonian_instance(n, i, cfg.seed));
  }
  for (const auto& model : cfg.noise) {
    for (int n : cfg.n) {
      const auto& hams = instances[n];
      double h_norm_mean = 0.0;
      for (const auto& h : hams) h_norm_mean += h.h_norm() / static_cast<double>(hams.size());
      for (int layers : cfg.layers) {
        const Circuit circ = build_two_local(n, layers);
        for (double p : p_values(cfg, model)) {
          GradientSweep sweep;
          sweep.circuit = circ;
          sweep.noise = NoiseSpec::broadcast(model.channel(p), n);
          sweep.hamiltonians = hams;
          for (const auto& name : cfg.locations) {
            sweep.locations.push_back(resolve_location(name, n, layers, cfg.slot));
          }
          sweep.theta_samples = cfg.theta_samples;
          sweep.seed = split_seed(cfg.seed, kThetaStream);
          sweep.threads = cfg.threads;
          const auto stats = gradient_stats(sweep);

          const double r_layer = layer_opnorm(circ, sweep.noise, 0);
          const double r_channel = channel_factor(sweep.noise, 0);
          // SVD round-off leaves the identity channel a few ulps below 1.
          const bool decays = r_channel < 1.0 - kContractionSlack;
          for (std::size_t k = 0; k < stats.size(); ++k) {
            rows.push_back({model.type, n, layers, p, cfg.locations[k], sweep.locations[k], stats[k], h_norm_mean,
                            r_layer, r_channel, decays ? nibp_bound(h_norm_mean, r_channel, layers) : kNaN,
                            decays ? nibp_bound(1.0, r_channel, layers) : kNaN,
                            h_norm_mean / std::sqrt(effective_dimension(n))});
          }
        }
      }
    }
  }

  ExperimentResult result;
  result.table.header = kGradientHeader;
  for (const auto& r : rows) {
    result.table.rows.push_back({to_string(cfg.preset), r.noise, std::to_string(r.n), std::to_string(r.layers),
                                 format_number(r.p), r.location, std::to_string(r.loc.layer),
                                 std::to_string(r.loc.slot), std::to_string(cfg.instances),
                                 std::to_string(r.stats.samples), format_number(r.stats.mean_abs),
                                 format_number(r.stats.variance), format_number(r.stats.min),
                                 format_number(r.stats.max), format_number(r.stats.variance_signed),
                                 format_number(r.stats.max_ratio), format_number(r.h_norm_mean),
                                 format_number(r.r_layer), format_number(r.r_channel), format_number(r.bound),
                                 format_number(r.bound_factor), format_number(r.reference)});
  }
  result.summary = summarize_gradients(cfg, rows);
  return result;
}

ExperimentResult run_final_cost(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.table.header = kFinalCostHeader;
  for (const auto& model : cfg.noise) {
    for (int n : cfg.n) {
      std::vector<Hamiltonian> hams;
      std::vector<double> traces;
      std::vector<double> grounds;
      for (int i = 0; i < cfg.instances; ++i) {
        hams.push_back(hamiltonian_instance(n, i, cfg.seed));
        traces.push_back(hams.back().trace_over_dim());
        grounds.push_back(ground_energy(hams.back()));
      }
      for (int layers : cfg.layers) {
        const Circuit circ = build_two_local(n, layers);
        for (double p : p_values(cfg, model)) {
          const NoiseSpec noise = NoiseSpec::broadcast(model.channel(p), n);
          std::vector<double> finals(hams.size());
          std::vector<int> evaluations(hams.size());
          parallel_for(hams.size(), cfg.threads, [&](std::size_t i) {
            SpsaConfig spsa = cfg.spsa;
            spsa.seed = split_seed(cfg.seed, {kSpsaStream, static_cast<std::uint64_t>(n), i});
            const TrainTrace trace = train_circuit(circ, noise, hams[i], spsa);
            finals[i] = trace.final_cost;
            evaluations[i] = trace.evaluations;
          });
          const double mean = mean_of(finals);
          double ss = 0.0;
          for (double f : finals) ss += (f - mean) * (f - mean);
          const double sd = finals.size() > 1 ? std::sqrt(ss / static_cast<double>(finals.size() - 1)) : 0.0;
          result.table.rows.push_back(
              {to_string(cfg.preset), model.type, std::to_string(n), std::to_string(layers), format_number(p),
               std::to_string(cfg.instances), format_number(mean), format_number(sd),
               format_number(*std::min_element(finals.begin(), finals.end())),
               format_number(*std::max_element(finals.begin(), finals.end())), format_number(mean_of(traces)),
               format_number(mean_of(grounds)), std::to_string(evaluations.front())});
        }
      }
    }
  }
  result.summary = Json::array();
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result = cfg.preset == Preset::kFinalCost ? run_final_cost(cfg) : run_gradient_grid(cfg);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string plot_script(const ExperimentConfig& cfg, const std::string& csv_name) {
  std::string axis;
  switch (cfg.preset) {
    case Preset::kLayersSweep:
      axis = "L";
      break;
    case Preset::kNoiseSweep:
      axis = "p";
      break;
    case Preset::kFinalCost:
      axis = "p";
      break;
    default:
      axis = "n";
      break;
  }
  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "# Generated by nibp-lab " + std::string(NIBP_VERSION) + " for preset " + to_string(cfg.preset) + ".\n";
  s += "import os\n";
  s += "import matplotlib\n";
  s += "matplotlib.use('Agg')\n";
  s += "import matplotlib.pyplot as plt\n";
  s += "import numpy as np\n";
  s += "import pandas as pd\n\n";
  s += "here = os.path.dirname(os.path.abspath(__file__))\n";
  s += "df = pd.read_csv(os.path.join(here, '" + csv_name + "'))\n";
  s += "x = '" + axis + "'\n";
  if (cfg.preset == Preset::kFinalCost) {
    s += "fig, axes = plt.subplots(1, df['n'].nunique(), figsize=(5 * df['n'].nunique(), 4), squeeze=False)\n";
    s += "for ax, (n, part) in zip(axes[0], df.groupby('n')):\n";
    s += "    for noise, g in part.groupby('noise'):\n";
    s += "        ax.errorbar(g[x], g['mean_final_cost'], yerr=g['std_final_cost'], marker='o', capsize=3, label=noise)\n";
    s += "    ax.plot(part[x], part['mean_trace_over_dim'], 'k--', label='Tr(H)/d')\n";
    s += "    ax.axhline(0.0, color='gray', lw=0.8)\n";
    s += "    ax.set_xlabel(x)\n";
    s += "    ax.set_ylabel('final cost')\n";
    s += "    ax.set_title(f'n = {n}')\n";
    s += "    ax.legend()\n";
  } else {
    s += "noises = list(df['noise'].unique())\n";
    s += "fig, axes = plt.subplots(2, len(noises), figsize=(5 * len(noises), 8), squeeze=False)\n";
    s += "for col, noise in enumerate(noises):\n";
    s += "    part = df[df['noise'] == noise]\n";
    s += "    top, bottom = axes[0][col], axes[1][col]\n";
    s += "    for loc, g in part.groupby('location', sort=False):\n";
    s += "        g = g.sort_values(x)\n";
    s += "        lo = np.log10(g['mean_abs']) - np.log10(g['min_abs'].clip(lower=1e-300))\n";
    s += "        hi = np.log10(g['max_abs']) - np.log10(g['mean_abs'])\n";
    s += "        top.errorbar(g[x], np.log10(g['mean_abs']), yerr=[lo, hi], marker='o', capsize=3, label=loc)\n";
    s += "        bottom.plot(g[x], np.log10(g['var_abs']), marker='o', label=loc)\n";
    s += "    ref = part.drop_duplicates(subset=[x]).sort_values(x)\n";
    if (cfg.preset == Preset::kWidthScaling) {
      s += "    top.plot(ref[x], np.log10(ref['reference']), 'k-.', label='|h|/sqrt(D)')\n";
    } else {
      s += "    top.plot(ref[x], np.log10(ref['bound']), 'k-.', label='|h| r^L')\n";
    }
    s += "    top.set_title(noise)\n";
    s += "    top.set_ylabel('log10 mean |dC|')\n";
    s += "    bottom.set_ylabel('log10 var |dC|')\n";
    s += "    bottom.set_xlabel(x)\n";
    s += "    top.legend()\n";
  }
  s += "fig.tight_layout()\n";
  s += "fig.savefig(os.path.join(here, '" + to_string(cfg.preset) + ".png'), dpi=150)\n";
  return s;
}

std::string version_string() { return NIBP_VERSION; }

OutputPaths output_paths(const std::filesystem::path& dir, const std::string& stem) {
  return {dir / (stem + ".csv"), dir / (stem + ".meta.json"), dir / ("plot_" + stem + ".py")};
}

void ensure_fresh(const std::vector<std::filesystem::path>& paths, bool force) {
  if (force) return;
  for (const auto& p : paths) {
    if (std::filesystem::exists(p)) {
      throw ConfigError("output '" + p.string() + "' exists; pass --force to overwrite");
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

OutputPaths write_experiment(const ExperimentResult& result, const ExperimentConfig& cfg,
                             const std::filesystem::path& dir, bool force) {
  const OutputPaths paths = output_paths(dir, to_string(cfg.preset));
  ensure_fresh({paths.csv, paths.metadata, paths.plot}, force);
  write_text(paths.csv, result.table.to_csv());
  const Json metadata{{"version", version_string()},
                      {"config", to_json(cfg)},
                      {"seeds",
                       {{"root", cfg.seed},
                        {"hamiltonian_stream", kHamiltonianStream},
                        {"theta_stream", kThetaStream},
                        {"spsa_stream", kSpsaStream}}},
                      {"rows", result.table.rows.size()},
                      {"csv", paths.csv.filename().string()},
                      {"wall_seconds", result.wall_seconds},
                      {"summary", result.summary}};
  write_text(paths.metadata, metadata.dump(2) + "\n");
  write_text(paths.plot, plot_script(cfg, paths.csv.filename().string()));
  std::filesystem::permissions(paths.plot, std::filesystem::perms::owner_exec, std::filesystem::perm_options::add);
  return paths;
}

}  // namespace nibp
