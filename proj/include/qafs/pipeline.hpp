// Copyright 2026 The qafs Authors
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
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qafs/adiabatic_sim.hpp"
#include "qafs/exact_oracle.hpp"
#include "qafs/ising_encoder.hpp"
#include "qafs/mi_engine.hpp"

namespace qafs {

/// Parameters of one command-line run.
struct RunConfig {
  // Data source: exactly one of `input` and `synthetic`.
  std::optional<std::filesystem::path> input;
  bool synthetic = false;
  std::string target;
  char delimiter = ',';
  std::size_t synthetic_features = 3;
  std::size_t synthetic_samples = 100;
  std::optional<std::size_t> planted_feature;
  std::uint64_t seed = 7;

  std::size_t bins = kDefaultBinCount;
  bool normalize = false;
  std::optional<double> alpha;  // empty selects alpha_star
  std::size_t k = 1;

  std::size_t grid_points = kDefaultGridPoints;
  double safety = kDefaultSafetyFactor;
  std::optional<double> time_override;
  double readout_tolerance = 1e-3;
  /// Upper bound on recorded trace rows; unitarity is still checked every step.
  std::size_t max_trace_points = 2001;

  std::vector<double> alpha_sweep;      // scan only
  std::optional<std::size_t> curve_max;  // compare only; defaults to n

  std::filesystem::path out_dir = ".";

  /// Throws ConfigError for inconsistent settings.
  void validate() const;
};

Dataset load_dataset(const RunConfig& config);
MIMatrix compute_mi_matrix(const RunConfig& config);

/// Everything produced by one adiabatic selection run.
struct SelectionRun {
  MIMatrix matrix;
  double alpha = 0.0;
  IsingProblem problem;
  bool noncommuting = true;
  GapScan scan;
  double norm_dHds = 0.0;
  double gamma = 0.0;
  LocalDelay local_delay;
  double total_time = 0.0;
  EvolutionTrace trace;
  FeatureSubset selected;
  /// Most probable readout subsets, tied within 1e-9.
  std::vector<FeatureSubset> top_subsets;
};

SelectionRun run_selection(const RunConfig& config, const MIMatrix& matrix);

struct CurvePoint {
  std::size_t m = 0;
  double classical = 0.0;  // training_size * m^2
  double quantum = 0.0;    // 1 / g_min^2 on the first m features; NaN if unavailable
};

/// Classical n m^2 against quantum 1 / g_min^2 for m = 1..m_max.
std::vector<CurvePoint> complexity_curve(const MIMatrix& matrix, std::size_t training_size,
                                         std::optional<double> alpha, std::size_t k,
                                         std::size_t m_max, std::size_t grid_points);

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> read_curve_csv(std::istream& in);

/// `mi`: writes mi_matrix.json.
nlohmann::json cmd_mi(const RunConfig& config);
/// `select`: writes mi_matrix.json, ising_problem.json, trace.csv, trace.json,
/// select_report.json.
nlohmann::json cmd_select(const RunConfig& config);
/// `compare`: select outputs plus oracle.json, complexity.csv,
/// compare_report.json.
nlohmann::json cmd_compare(const RunConfig& config);
/// `scan`: writes gap_scan.csv, scan_report.json and, with an alpha sweep,
/// alpha_sweep.csv.
nlohmann::json cmd_scan(const RunConfig& config);

/// Parses "a,b,c" or "start:stop:step" (inclusive). Throws ConfigError on an
/// empty or malformed range.
std::vector<double> parse_alpha_range(const std::string& text);

}  // namespace qafs
