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

#include <filesystem>
#include <string>
#include <vector>

#include "nibp/circuit.hpp"
#include "nibp/config.hpp"
#include "nibp/hamiltonian.hpp"

namespace nibp {

/// Rows of formatted cells under a fixed header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& name) const;
  /// Header line plus one line per row, '\n' terminated.
  std::string to_csv() const;
};

struct ExperimentResult {
  Table table;
  /// Derived per-group quantities (fit slopes, bound checks).
  Json summary;
  double wall_seconds = 0.0;
};

/// Round-trip decimal text; NaN prints as "nan".
std::string format_number(double x);

/// Resolves a location name of `ExperimentConfig::locations` to the rotation
/// `slot` of the named layer.
GateLocation resolve_location(const std::string& name, int num_qubits, int num_layers, int slot);

/// Instance i of width n; identical across presets and grid points.
Hamiltonian hamiltonian_instance(int num_qubits, int index, std::uint64_t root_seed);

/// Effective dimension (n^2 + n) / 2 of a 2-local h.
double effective_dimension(int num_qubits);

ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_gradient_grid(const ExperimentConfig& cfg);
ExperimentResult run_final_cost(const ExperimentConfig& cfg);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Python plotting script reading `csv_name` next to it.
std::string plot_script(const ExperimentConfig& cfg, const std::string& csv_name);

std::string version_string();

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path metadata;
  std::filesystem::path plot;
};

OutputPaths output_paths(const std::filesystem::path& dir, const std::string& stem);

/// Error when any path exists and `force` is false.
void ensure_fresh(const std::vector<std::filesystem::path>& paths, bool force);

/// Writes the CSV, the metadata JSON and the plot script into `dir`.
OutputPaths write_experiment(const ExperimentResult& result, const ExperimentConfig& cfg,
                             const std::filesystem::path& dir, bool force);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nibp
