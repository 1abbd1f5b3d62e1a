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


#include "nibp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace nibp {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
std::vector<T> parse_grid(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  std::vector<T> out;
  if (v.is_number()) {
    out.push_back(get_as<T>(j, key));
  } else if (v.is_array()) {
    try {
      out = v.get<std::vector<T>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad list for '" + key + "': " + e.what());
    }
  } else if (v.is_object()) {
    check_keys(v, {"from", "to", "step"}, "'" + key + "' range");
    const double from = get_as<double>(v, "from");
    const double to = get_as<double>(v, "to");
    const double step = v.contains("step") ? get_as<double>(v, "step") : 1.0;
    if (!(step > 0.0) || to < from) throw ConfigError("range '" + key + "' needs step > 0 and to >= from");
    const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(static_cast<T>(from + static_cast<double>(i) * step));
  } else {
    throw ConfigError("'" + key + "' must be a number, a list or a range object");
  }
  if (out.empty()) throw ConfigError("grid '" + key + "' is empty");
  return out;
}

bool valid_location(const std::string& loc) {
  if (loc == "first" || loc == "middle" || loc == "last") return true;
  if (loc.rfind("suffix:", 0) != 0) return false;
  const std::string arg = loc.substr(7);
  if (arg == "log" || arg == "half") return true;
  return !arg.empty() && arg.find_first_not_of("0123456789") == std::string::npos;
}

std::vector<int> int_range(int from, int to) {
  std::vector<int> out;
  for (int i = from; i <= to; ++i) out.push_back(i);
  return out;
}

std::vector<double> p_grid(int steps, double top) {
  std::vector<double> out;
  for (int i = 0; i <= steps; ++i) out.push_back(top * i / steps);
  return out;
}

}  // namespace

KrausChannel NoiseModel::channel(double p) const {
  if (type == "custom") return KrausChannel(custom_kraus);
  return named_channel(type, p);
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::kLayersSweep:
      return "layers_sweep";
    case Preset::kNoiseSweep:
      return "noise_sweep";
    case Preset::kFinalCost:
      return "final_cost";
    case Preset::kWidthScaling:
      return "width_scaling";
    case Preset::kTrainability:
      return "trainability";
  }
  return "unknown";
}

Preset parse_preset(const std::string& name) {
  for (Preset p : {Preset::kLayersSweep, Preset::kNoiseSweep, Preset::kFinalCost, Preset::kWidthScaling,
                   Preset::kTrainability}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

ExperimentConfig preset_defaults(Preset preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  cfg.noise = {NoiseModel{"depolarizing", {}}, NoiseModel{"amplitude_damping", {}}};
  cfg.locations = {"first", "middle", "last"};
  switch (preset) {
    case Preset::kLayersSweep:
      cfg.n = {3};
      cfg.layers = int_range(2, 24);
      cfg.p = {0.3};
      break;
    case Preset::kNoiseSweep:
      cfg.n = {3};
      cfg.layers = {20};
      cfg.p = p_grid(10, 0.5);
      break;
    case Preset::kFinalCost:
      cfg.n = {3, 5};
      cfg.layers = {5};
      cfg.p = p_grid(10, 0.5);
      cfg.locations.clear();
      break;
    case Preset::kWidthScaling:
      cfg.n = int_range(2, 6);
      cfg.layers = {5};
      cfg.p = {0.1, 0.2, 0.3};
      break;
    case Preset::kTrainability:
      cfg.n = {2, 3, 4};
      cfg.layers = {20};
      cfg.p = {0.3};
      cfg.locations = {"suffix:0", "suffix:log", "suffix:half"};
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (n.empty() || layers.empty() || p.empty() || noise.empty()) throw ConfigError("sweep lists must be nonempty");
  if (instances < 1) throw ConfigError("instances must be at least 1");
  if (theta_samples < 1) throw ConfigError("theta_samples must be at least 1");
  for (int q : n) {
    if (q < 2 || q > 9) throw ConfigError("n must lie in 2..9");
  }
  for (int l : layers) {
    if (l < 1) throw ConfigError("L must be at least 1");
  }
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  }
  for (const auto& loc : locations) {
    if (!valid_location(loc)) throw ConfigError("unknown location '" + loc + "'");
  }
  if (preset != Preset::kFinalCost && locations.empty()) throw ConfigError("no gradient locations tracked");
  for (int q : n) {
    if (slot < 0 || slot >= q) throw ConfigError("slot must address a rotation of the layer");
  }
  try {
    spsa.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("spsa: ") + e.what());
  }
}

std::vector<int> parse_int_grid(const Json& j, const std::string& key) { return parse_grid<int>(j, key); }

std::vector<double> parse_real_grid(const Json& j, const std::string& key) {
  return parse_grid<double>(j, key);
}

std::vector<CMatrix> parse_kraus(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("kraus must be a nonempty list of matrices");
  std::vector<CMatrix> out;
  for (const Json& m : j) {
    if (!m.is_array() || m.empty()) throw ConfigError("kraus matrix must be a list of rows");
    const auto rows = static_cast<Eigen::Index>(m.size());
    CMatrix k(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Json& row = m[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
        throw ConfigError("kraus matrix must be square");
      }
      for (Eigen::Index c = 0; c < rows; ++c) {
        const Json& entry = row[static_cast<std::size_t>(c)];
        if (entry.is_number()) {
          k(r, c) = Complex(entry.get<double>(), 0.0);
        } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() && entry[1].is_number()) {
          k(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        } else {
          throw ConfigError("kraus entries must be numbers or [re, im] pairs");
        }
      }
    }
    out.push_back(std::move(k));
  }
  return out;
}

std::vector<NoiseModel> parse_noise(const Json& j) {
  std::vector<std::string> names;
  if (j.contains("noise_type")) {
    const Json& v = j.at("noise_type");
    if (v.is_string()) {
      names.push_back(v.get<std::string>());
    } else {
      names = get_as<std::vector<std::string>>(j, "noise_type");
    }
  }
  std::vector<NoiseModel> out;
  for (const auto& name : names) {
    NoiseModel model{name, {}};
    if (name == "custom") {
      if (!j.contains("custom_channel")) throw ConfigError("noise_type custom needs custom_channel");
      const Json& custom = j.at("custom_channel");
      check_keys(custom, {"kraus"}, "custom_channel");
      model.custom_kraus = parse_kraus(custom.at("kraus"));
      try {
        const KrausChannel ch(model.custom_kraus);
        if (ch.num_qubits() != 1) throw ConfigError("custom_channel must act on one qubit");
        if (!validate_kraus(ch).trace_preserving) throw ConfigError("custom_channel is not trace preserving");
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError(std::string("custom_channel: ") + e.what());
      }
    } else {
      try {
        named_channel(name, 0.1);
      } catch (const ConfigError&) {
        throw ConfigError("unknown noise_type '" + name + "'");
      }
    }
    out.push_back(std::move(model));
  }
  if (names.empty() && j.contains("custom_channel")) throw ConfigError("custom_channel given without noise_type custom");
  return out;
}

SpsaConfig parse_spsa(const Json& j, SpsaConfig base) {
  check_keys(j, {"maxiter", "a", "c", "A", "alpha", "gamma", "target_step", "calibration_samples"}, "spsa");
  if (j.contains("maxiter")) base.maxiter = get_as<int>(j, "maxiter");
  if (j.contains("a")) base.a = get_as<double>(j, "a");
  if (j.contains("c")) base.c = get_as<double>(j, "c");
  if (j.contains("A")) base.A = get_as<double>(j, "A");
  if (j.contains("alpha")) base.alpha = get_as<double>(j, "alpha");
  if (j.contains("gamma")) base.gamma = get_as<double>(j, "gamma");
  if (j.contains("target_step")) base.target_step = get_as<double>(j, "target_step");
  if (j.contains("calibration_samples")) base.calibration_samples = get_as<int>(j, "calibration_samples");
  try {
    base.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("spsa: ") + e.what());
  }
  return base;
}

Json to_json(const SpsaConfig& cfg) {
  Json j{{"maxiter", cfg.maxiter}, {"c", cfg.c},          {"A", cfg.stability()},
         {"alpha", cfg.alpha},     {"gamma", cfg.gamma},  {"target_step", cfg.target_step},
         {"calibration_samples", cfg.calibration_samples}};
  if (cfg.a) j["a"] = *cfg.a;
  return j;
}

ExperimentConfig parse_experiment_config(const Json& j) {
  check_keys(j,
             {"preset", "n", "L", "p", "noise_type", "custom_channel", "instances", "theta_samples", "seed",
              "threads", "locations", "slot", "spsa", "output"},
             "experiment config");
  if (!j.contains("preset")) throw ConfigError("experiment config needs a preset");
  ExperimentConfig cfg = preset_defaults(parse_preset(get_as<std::string>(j, "preset")));
  if (j.contains("n")) cfg.n = parse_int_grid(j, "n");
  if (j.contains("L")) cfg.layers = parse_int_grid(j, "L");
  if (j.contains("p")) cfg.p = parse_real_grid(j, "p");
  if (j.contains("noise_type")) cfg.noise = parse_noise(j);
  if (j.contains("instances")) cfg.instances = get_as<int>(j, "instances");
  if (j.contains("theta_samples")) cfg.theta_samples = get_as<int>(j, "theta_samples");
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("threads")) cfg.threads = get_as<int>(j, "threads");
  if (j.contains("locations")) cfg.locations = get_as<std::vector<std::string>>(j, "locations");
  if (j.contains("slot")) cfg.slot = get_as<int>(j, "slot");
  if (j.contains("spsa")) cfg.spsa = parse_spsa(j.at("spsa"), cfg.spsa);
  cfg.validate();
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  Json noise = Json::array();
  for (const auto& m : cfg.noise) noise.push_back(m.type);
  Json j{{"preset", to_string(cfg.preset)},
         {"n", cfg.n},
         {"L", cfg.layers},
         {"p", cfg.p},
         {"noise_type", noise},
         {"instances", cfg.instances},
         {"theta_samples", cfg.theta_samples},
         {"seed", cfg.seed},
         {"locations", cfg.locations},
         {"slot", cfg.slot},
         {"spsa", to_json(cfg.spsa)}};
  for (const auto& m : cfg.noise) {
    if (m.type != "custom") continue;
    Json kraus = Json::array();
    for (const CMatrix& k : m.custom_kraus) {
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < k.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < k.cols(); ++c) row.push_back({k(r, c).real(), k(r, c).imag()});
        rows.push_back(row);
      }
      kraus.push_back(rows);
    }
    j["custom_channel"] = {{"kraus", kraus}};
  }
  return j;
}

Json matrix_to_json(const RMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Json vector_to_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace nibp
