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
#include <string>
#include <vector>

#include "json.hpp"
#include "nibp/channel.hpp"
#include "nibp/trainer.hpp"

namespace nibp {

using Json = nlohmann::json;

/// Single-qubit layer channel: a named family of strength p, or an explicit
/// Kraus list when type is "custom".
struct NoiseModel {
  std::string type = "depolarizing";
  std::vector<CMatrix> custom_kraus;

  bool parameterized() const { return type != "custom"; }
  KrausChannel channel(double p) const;
};

enum class Preset { kLayersSweep, kNoiseSweep, kFinalCost, kWidthScaling, kTrainability };

std::string to_string(Preset preset);
Preset parse_preset(const std::string& name);

struct ExperimentConfig {
  Preset preset = Preset::kLayersSweep;
  std::vector<int> n;
  std::vector<int> layers;
  std::vector<double> p;
  std::vector<NoiseModel> noise;
  int instances = 10;
  int theta_samples = 20;
  std::uint64_t seed = 0;
  int threads = 0;
  /// first | middle | last | suffix:<k> | suffix:log | suffix:half.
  std::vector<std::string> locations;
  int slot = 0;
  SpsaConfig spsa;

  /// ConfigError on violated invariants.
  void validate() const;
};

/// Defaults of a preset, before any key of the config file is applied.
ExperimentConfig preset_defaults(Preset preset);

/// Strict parse: unknown keys, wrong types and empty grids raise ConfigError.
ExperimentConfig parse_experiment_config(const Json& j);
Json to_json(const ExperimentConfig& cfg);

/// Applies the keys of an "spsa" object on top of `base`.
SpsaConfig parse_spsa(const Json& j, SpsaConfig base = {});
Json to_json(const SpsaConfig& cfg);

/// "noise_type" plus the optional "custom_channel" object.
std::vector<NoiseModel> parse_noise(const Json& j);

/// A scalar, a list, or {"from", "to", "step"} (inclusive).
std::vector<int> parse_int_grid(const Json& j, const std::string& key);
std::vector<double> parse_real_grid(const Json& j, const std::string& key);

/// Kraus operators as [[[re, im], ...], ...] rows.
std::vector<CMatrix> parse_kraus(const Json& j);
Json matrix_to_json(const RMatrix& m);
Json vector_to_json(const RVector& v);

Json read_json_file(const std::string& path);

}  // namespace nibp
