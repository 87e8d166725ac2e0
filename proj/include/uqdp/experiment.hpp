// Copyright 2026 The uqdp Authors
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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uqdp/config.hpp"

namespace uqdp {

/// String table with a header row. Column names carry their unit in
/// brackets, e.g. "T_phi [s]".
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of the column whose name (before any " [unit]") equals `name`.
  /// Throws std::invalid_argument naming the missing column.
  std::size_t column(std::string_view name) const;
  std::string to_csv() const;
  /// Minimal CSV reader for files written by to_csv (quoted fields allowed).
  static Table from_csv(std::string_view text);
};

/// Fixed, locale-independent number formatting used in every CSV.
std::string format_number(double value);

struct PointRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  std::string status;  // "ok", "lower bound", "error: ..." or "numerical: ..."
};

struct RunResult {
  Table table;
  std::vector<PointRecord> points;
  std::vector<std::string> warnings;
  /// Grid points that failed with a numerical error.
  std::vector<std::size_t> numerical_failures;
  std::size_t failed_points = 0;
  /// Kind-specific extras for the metadata (calibrations, fitted slopes).
  nlohmann::json extra = nlohmann::json::object();
};

/// Runs every grid point of the experiment. `threads` = 0 uses every core.
/// Per-point failures are recorded in the table and never abort the sweep.
RunResult run_experiment(const ExperimentConfig& config, std::size_t threads = 0);

/// Resolved quantities, step and runtime estimates and warnings, without
/// running the experiment.
std::vector<std::string> describe_config(const ExperimentConfig& config);

/// Writes results.csv and metadata.json into `dir` (created if needed).
void write_record(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& result,
                  const nlohmann::json& run_info);

enum class FigureKind { Fig1, Fig3a, Fig3b, Fig3c, Fig3d };
std::optional<FigureKind> figure_from_string(std::string_view name);

/// Reads results.csv from a record directory, a results CSV or the record's
/// metadata.json.
Table load_results(const std::filesystem::path& record);

/// Tidy plot data: columns x, series, value, stderr (with units).
/// Throws std::invalid_argument naming a missing column.
Table export_figure(const Table& results, FigureKind figure);

}  // namespace uqdp
