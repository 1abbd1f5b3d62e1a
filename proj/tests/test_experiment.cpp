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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nibp/bounds.hpp"
#include "nibp/experiment.hpp"

using namespace nibp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_sweep() {
  return parse_experiment_config(Json::parse(R"({"preset": "layers_sweep", "L": [2, 3], "p": [0.0, 0.3],
                                                 "instances": 2, "theta_samples": 3, "seed": 9})"));
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nibp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.3, 1.0 / 3.0, 2.5e-17, -7.0, 0.0, 123456.789}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.3) == "0.3");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("location names") {
  CHECK(resolve_location("first", 3, 24, 0) == GateLocation{0, 0});
  CHECK(resolve_location("middle", 3, 24, 1) == GateLocation{11, 1});
  CHECK(resolve_location("last", 3, 24, 2) == GateLocation{23, 2});
  CHECK(resolve_location("suffix:0", 4, 20, 0) == GateLocation{19, 0});
  CHECK(resolve_location("suffix:log", 3, 20, 0) == GateLocation{17, 0});
  CHECK(resolve_location("suffix:log", 4, 20, 0) == GateLocation{17, 0});
  CHECK(resolve_location("suffix:half", 2, 20, 0) == GateLocation{9, 0});
  CHECK_THROWS_AS(resolve_location("suffix:5", 3, 4, 0), ConfigError);
  CHECK_THROWS_AS(resolve_location("centre", 3, 4, 0), ConfigError);
  CHECK_THROWS_AS(resolve_location("last", 3, 4, 3), ConfigError);
}

TEST_CASE("effective dimension") {
  CHECK(effective_dimension(2) == 3.0);
  CHECK(effective_dimension(4) == 10.0);
}

TEST_CASE("slope fit") {
  CHECK(fit_slope({1, 2, 3, 4}, {2.5, 0.5, -1.5, -3.5}) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_slope({1}, {1}), PreconditionError);
  CHECK_THROWS_AS(fit_slope({2, 2}, {1, 3}), PreconditionError);
}

TEST_CASE("experiment config parsing") {
  const auto defaults = parse_experiment_config(Json::parse(R"({"preset": "layers_sweep"})"));
  CHECK(defaults.n == std::vector<int>{3});
  CHECK(defaults.layers.front() == 2);
  CHECK(defaults.layers.back() == 24);
  CHECK(defaults.layers.size() == 23);
  CHECK(defaults.noise.size() == 2);
  CHECK(defaults.instances == 10);
  CHECK(defaults.theta_samples == 20);

  const auto ranged = parse_experiment_config(
      Json::parse(R"({"preset": "noise_sweep", "p": {"from": 0, "to": 0.5, "step": 0.1}, "noise_type": "depolarizing"})"));
  REQUIRE(ranged.p.size() == 6);
  CHECK(ranged.p.back() == doctest::Approx(0.5));
  CHECK(ranged.noise.size() == 1);
  CHECK(ranged.layers == std::vector<int>{20});

  const auto width = parse_experiment_config(Json::parse(R"({"preset": "width_scaling", "n": 4})"));
  CHECK(width.n == std::vector<int>{4});

  const auto custom = parse_experiment_config(Json::parse(R"({"preset": "noise_sweep", "noise_type": "custom",
      "custom_channel": {"kraus": [[[1, 0], [0, [0.8, 0]]], [[0, 0.6], [0, 0]]]}})"));
  REQUIRE(custom.noise.size() == 1);
  CHECK_FALSE(custom.noise.front().parameterized());
  CHECK(validate_kraus(custom.noise.front().channel(0.0)).trace_preserving);

  const auto trained = parse_experiment_config(Json::parse(R"({"preset": "final_cost", "spsa": {"maxiter": 7, "a": 0.2}})"));
  CHECK(trained.spsa.maxiter == 7);
  CHECK(*trained.spsa.a == 0.2);

  const auto round = parse_experiment_config(to_json(custom));
  CHECK(to_json(round) == to_json(custom));

  const auto bad = [](const char* text) { return parse_experiment_config(Json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "L": []})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "instances": 0})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "p": 1.5})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "n": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "noise_type": "fog"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "noise_type": "custom"})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "noise_type": "custom", "custom_channel": {"kraus": [[[1, 0], [0, 0.5]]]}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "locations": ["centre"]})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "final_cost", "spsa": {"c": 0}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"L": 3})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"preset": "layers_sweep", "L": "many"})"), ConfigError);
}

TEST_CASE("gradient grid rows and bound columns") {
  const ExperimentConfig cfg = tiny_sweep();
  const ExperimentResult result = run_experiment(cfg);
  const Table& t = result.table;
  CHECK(t.rows.size() == cfg.noise.size() * cfg.layers.size() * cfg.p.size() * cfg.locations.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].size() == t.header.size());
    CHECK(t.number(i, "samples") == 6);
    const double p = t.number(i, "p");
    if (p == 0.0) {
      CHECK(std::isnan(t.number(i, "bound")));
    } else if (t.cell(i, "noise") == "depolarizing") {
      CHECK(t.number(i, "r_channel") == doctest::Approx(0.6).epsilon(1e-12));
      const double bound = nibp_bound(t.number(i, "h_norm_mean"), 0.6, static_cast<int>(t.number(i, "L")));
      CHECK(t.number(i, "bound") == doctest::Approx(bound).epsilon(1e-12));
      CHECK(t.number(i, "max_ratio") <= t.number(i, "bound_factor"));
    }
    CHECK(t.number(i, "reference") ==
          doctest::Approx(t.number(i, "h_norm_mean") / std::sqrt(effective_dimension(3))).epsilon(1e-12));
  }
  CHECK(result.summary.is_array());
}

TEST_CASE("experiments are reproducible across thread counts") {
  ExperimentConfig cfg = tiny_sweep();
  cfg.threads = 1;
  const std::string serial = run_experiment(cfg).table.to_csv();
  cfg.threads = 4;
  CHECK(run_experiment(cfg).table.to_csv() == serial);
  cfg.seed = 10;
  CHECK(run_experiment(cfg).table.to_csv() != serial);
}

TEST_CASE("final cost preset") {
  const auto cfg = parse_experiment_config(Json::parse(R"({"preset": "final_cost", "n": 2, "L": 2, "p": [0.0, 0.4],
      "noise_type": "depolarizing", "instances": 2, "spsa": {"maxiter": 20}})"));
  const auto result = run_experiment(cfg);
  REQUIRE(result.table.rows.size() == 2);
  CHECK(result.table.number(0, "evaluations_per_run") == 41);
  CHECK(std::abs(result.table.number(0, "mean_ground_energy")) < 1e-9);
  CHECK(result.table.number(1, "std_final_cost") >= 0.0);
}

TEST_CASE("trainability summary compares against unital noise") {
  const auto cfg = parse_experiment_config(Json::parse(R"({"preset": "trainability", "n": [2, 3], "L": 6,
      "instances": 2, "theta_samples": 3})"));
  const auto result = run_experiment(cfg);
  CHECK(result.table.rows.size() == 2 * 2 * 3);
  int flagged = 0;
  for (const auto& entry : result.summary) {
    if (entry.contains("decays_slower_than_unital")) ++flagged;
  }
  CHECK(flagged == 3);
}

TEST_CASE("experiment outputs need a fresh path or force") {
  const fs::path dir = scratch_dir("outputs");
  const ExperimentConfig cfg = tiny_sweep();
  const ExperimentResult result = run_experiment(cfg);
  const OutputPaths paths = write_experiment(result, cfg, dir, false);
  CHECK(fs::exists(paths.csv));
  CHECK(fs::exists(paths.plot));
  const Json meta = Json::parse(slurp(paths.metadata));
  CHECK(meta["rows"] == result.table.rows.size());
  CHECK(meta["config"]["preset"] == "layers_sweep");
  CHECK(slurp(paths.csv) == result.table.to_csv());
  CHECK_THROWS_AS(write_experiment(result, cfg, dir, false), ConfigError);
  CHECK_NOTHROW(write_experiment(result, cfg, dir, true));
  fs::remove_all(dir);
}

TEST_CASE("plot scripts reference their csv") {
  for (const char* preset : {"layers_sweep", "final_cost", "width_scaling"}) {
    const auto cfg = parse_experiment_config(Json{{"preset", preset}});
    const std::string script = plot_script(cfg, std::string(preset) + ".csv");
    CHECK(script.find(std::string(preset) + ".csv") != std::string::npos);
    CHECK(script.find("matplotlib") != std::string::npos);
  }
}
