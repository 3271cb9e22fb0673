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

#include "qafs/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qafs/error.hpp"

namespace qafs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  const auto path = config.out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_json(const RunConfig& config, const std::string& name, const nlohmann::json& j) {
  open_output(config, name) << j.dump(2) << '\n';
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

nlohmann::json readout_json(const std::vector<ReadoutEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json item = e.subset;
    item["probability"] = e.probability;
    out.push_back(std::move(item));
  }
  return out;
}

nlohmann::json selection_json(const RunConfig& config, const SelectionRun& run) {
  nlohmann::json top = nlohmann::json::array();
  for (const auto& s : run.top_subsets) top.push_back(s);
  const auto& final_point = run.trace.points.back();
  return nlohmann::json{
      {"n", run.problem.n},
      {"k", run.problem.k},
      {"alpha", run.alpha},
      {"alpha_mode", config.alpha ? "fixed" : "auto"},
      {"noncommuting", run.noncommuting},
      {"g_min", run.scan.g_min},
      {"s_at_gmin", run.scan.s_at_gmin},
      {"norm_dHds", run.norm_dHds},
      {"gamma", run.gamma},
      {"local_integral", run.local_delay.value},
      {"local_integral_grid_points", run.local_delay.grid_points},
      {"local_integral_converged", run.local_delay.converged},
      {"total_time", run.total_time},
      {"time_mode", config.time_override ? "override" : "safety/g_min^2"},
      {"steps", run.trace.steps},
      {"final_success_prob", final_point.success_prob},
      {"final_ground_fidelity", final_point.ground_fidelity},
      {"max_norm_deviation", run.trace.max_norm_deviation},
      {"selected", run.selected},
      {"top_subsets", top},
      {"candidates", readout_json(run.trace.candidates)},
  };
}

void write_selection_outputs(const RunConfig& config, const SelectionRun& run) {
  write_json(config, "mi_matrix.json", run.matrix);
  write_json(config, "ising_problem.json", run.problem);
  {
    auto out = open_output(config, "trace.csv");
    write_trace_csv(out, run.trace.points);
  }
  nlohmann::json trace = {
      {"points", run.trace.points},
      {"summary",
       {{"g_min", run.scan.g_min},
        {"s_at_gmin", run.scan.s_at_gmin},
        {"trace_g_min", run.trace.g_min},
        {"trace_s_at_gmin", run.trace.s_at_gmin},
        {"gamma", run.gamma},
        {"local_integral", run.local_delay.value},
        {"total_time", run.total_time},
        {"steps", run.trace.steps},
        {"candidates", readout_json(run.trace.candidates)}}},
  };
  write_json(config, "trace.json", trace);
}

}  // namespace

void RunConfig::validate() const {
  if (input.has_value() == synthetic) {
    throw ConfigError("exactly one of --input and --synthetic is required");
  }
  if (input && target.empty()) throw ConfigError("--target is required with --input");
  if (bins == 0) throw ConfigError("--bins must be at least 1");
  if (alpha && !(*alpha >= 0.0)) throw ConfigError("--alpha must be non-negative");
  if (grid_points < 2) throw ConfigError("--grid must be at least 2");
  if (!(safety > 0.0)) throw ConfigError("--safety must be positive");
  if (time_override && !(*time_override > 0.0)) throw ConfigError("--time must be positive");
  if (synthetic && synthetic_features == 0) throw ConfigError("--features must be at least 1");
  if (synthetic && synthetic_samples == 0) throw ConfigError("--samples must be at least 1");
  if (max_trace_points < 2) throw ConfigError("trace needs at least 2 recorded points");
}

Dataset load_dataset(const RunConfig& config) {
  config.validate();
  if (config.synthetic) {
    return make_synthetic_dataset(config.seed, config.synthetic_features,
                                  config.synthetic_samples, config.planted_feature);
  }
  return ingest_dataset(*config.input, config.target, CsvOptions{config.delimiter});
}

MIMatrix compute_mi_matrix(const RunConfig& config) {
  const auto data = load_dataset(config);
  auto m = build_mi_matrix(data, config.bins);
  return config.normalize ? normalize_mi_matrix(m) : m;
}

SelectionRun run_selection(const RunConfig& config, const MIMatrix& matrix) {
  config.validate();
  if (config.k > matrix.n) {
    throw ConfigError("k = " + std::to_string(config.k) + " exceeds the " +
                      std::to_string(matrix.n) + " available features");
  }
  SelectionRun run;
  run.matrix = matrix;
  run.alpha = config.alpha.value_or(alpha_star(matrix));
  run.problem = encode_qubo(matrix, run.alpha, config.k);

  const auto hp = build_problem_hamiltonian(run.problem);
  const auto h0 = build_mixer(run.problem.n);
  run.noncommuting = check_noncommute(h0, hp);

  try {
    run.scan = scan_gap(h0, hp, Schedule::gap_scan(config.grid_points));
  } catch (const DegenerateGapError& e) {
    throw DegenerateGapError(std::string(e.what()) +
                             "; the optimum is degenerate, raise --alpha or change --k");
  }
  run.norm_dHds = spectral_norm(hp.matrix() - h0.matrix());
  run.gamma = global_time_bound(run.scan.g_min, run.norm_dHds);
  run.local_delay = converged_local_delay(h0, hp, run.norm_dHds, config.grid_points);
  run.total_time = config.time_override.value_or(config.safety /
                                                 (run.scan.g_min * run.scan.g_min));

  const std::size_t steps = default_steps(run.total_time, run.norm_dHds);
  EvolveOptions options;
  options.initial_state = initial_state(run.problem.n);
  options.record_stride = std::max<std::size_t>(
      1, (steps + config.max_trace_points - 2) / (config.max_trace_points - 1));
  options.readout_tolerance = config.readout_tolerance;
  options.step_exponential = StepExponential::kTaylor;
  run.trace = evolve(h0, hp, run.total_time, steps, options);

  // Most probable basis state(s) of the final state.
  const auto full = readout(run.trace.final_state / run.trace.final_state.norm(), 0.0);
  const double best = full.front().probability;
  for (const auto& e : full) {
    if (best - e.probability > 1e-9) break;
    run.top_subsets.push_back(e.subset);
  }
  std::sort(run.top_subsets.begin(), run.top_subsets.end(),
            [](const FeatureSubset& a, const FeatureSubset& b) {
              return a.basis_index() < b.basis_index();
            });
  run.selected = full.front().subset;
  return run;
}

std::vector<CurvePoint> complexity_curve(const MIMatrix& matrix, std::size_t training_size,
                                         std::optional<double> alpha, std::size_t k,
                                         std::size_t m_max, std::size_t grid_points) {
  std::vector<CurvePoint> curve;
  for (std::size_t m = 1; m <= m_max; ++m) {
    CurvePoint point;
    point.m = m;
    point.classical = static_cast<double>(training_size) * static_cast<double>(m * m);
    point.quantum = kNaN;
    if (m <= matrix.n && m <= kMaxDenseQubits) {
      std::vector<std::vector<double>> rows(m, std::vector<double>(m));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) rows[i][j] = matrix(i, j);
      }
      const auto sub = MIMatrix::from_rows(std::move(rows));
      const auto problem = encode_qubo(sub, alpha.value_or(alpha_star(sub)), std::min(k, m));
      try {
        const auto scan = scan_gap(build_mixer(m), build_problem_hamiltonian(problem),
                                   Schedule::gap_scan(grid_points));
        point.quantum = 1.0 / (scan.g_min * scan.g_min);
      } catch (const DegenerateGapError&) {
        // Undefined bound; left as NaN.
      }
    }
    curve.push_back(point);
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "m,classical,quantum\n";
  for (const auto& p : curve) {
    out << p.m << ',' << format_double(p.classical) << ',' << format_double(p.quantum) << '\n';
  }
}

std::vector<CurvePoint> read_curve_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty curve file", line_no);
  std::vector<CurvePoint> curve;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string m, classical, quantum;
    if (!std::getline(row, m, ',') || !std::getline(row, classical, ',') ||
        !std::getline(row, quantum)) {
      throw ParseError("expected 3 fields", line_no);
    }
    auto number = [&](const std::string& text) {
      if (text == "nan") return kNaN;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("not a number: '" + text + "'", line_no);
      }
      return v;
    };
    curve.push_back({static_cast<std::size_t>(number(m)), number(classical), number(quantum)});
  }
  return curve;
}

nlohmann::json cmd_mi(const RunConfig& config) {
  const auto m = compute_mi_matrix(config);
  write_json(config, "mi_matrix.json", m);
  std::vector<double> diagonal(m.n);
  for (std::size_t i = 0; i < m.n; ++i) diagonal[i] = m(i, i);
  return nlohmann::json{{"n", m.n}, {"sum", m.sum()}, {"max", m.max_abs()}, {"relevance", diagonal}};
}

nlohmann::json cmd_select(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto run = run_selection(config, compute_mi_matrix(config));
  write_selection_outputs(config, run);
  auto report = selection_json(config, run);
  report["wall_clock_seconds"] = elapsed_seconds(start);
  write_json(config, "select_report.json", report);
  return report;
}

nlohmann::json cmd_compare(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto data = load_dataset(config);
  auto matrix = build_mi_matrix(data, config.bins);
  if (config.normalize) matrix = normalize_mi_matrix(matrix);
  if (matrix.n > kMaxBruteForceFeatures) {
    throw CapacityError("compare is limited to " + std::to_string(kMaxBruteForceFeatures) +
                        " features");
  }

  const auto run = run_selection(config, matrix);
  write_selection_outputs(config, run);
  const auto oracle = brute_force_select(matrix, run.alpha, config.k);
  write_json(config, "oracle.json", oracle);

  const bool match = run.top_subsets == oracle.optimal;
  const double fidelity = run.trace.points.back().ground_fidelity;
  const auto curve = complexity_curve(matrix, data.sample_count(), config.alpha, config.k,
                                      config.curve_max.value_or(matrix.n), config.grid_points);
  {
    auto out = open_output(config, "complexity.csv");
    write_curve_csv(out, curve);
  }

  nlohmann::json report = {
      {"select", selection_json(config, run)},
      {"oracle", oracle},
      {"match", match},
      {"quantum_objective", selection_objective(matrix, run.selected)},
      {"oracle_objective", oracle.objective_value},
      {"quantum_energy", penalized_energy(matrix, run.alpha, config.k, run.selected)},
      {"oracle_energy", oracle.best_energy},
      {"diabatic_failure", !match || fidelity < 0.5},
      {"training_size", data.sample_count()},
  };
  report["wall_clock_seconds"] = elapsed_seconds(start);
  write_json(config, "compare_report.json", report);
  return report;
}

nlohmann::json cmd_scan(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto matrix = compute_mi_matrix(config);
  if (config.k > matrix.n) throw ConfigError("k exceeds the available features");
  const double alpha = config.alpha.value_or(alpha_star(matrix));
  const auto schedule = Schedule::gap_scan(config.grid_points);
  const auto h0 = build_mixer(matrix.n);

  nlohmann::json report = {{"n", matrix.n}, {"k", config.k}, {"alpha", alpha}};
  if (!config.alpha_sweep.empty()) {
    auto out = open_output(config, "alpha_sweep.csv");
    out << "alpha,s_at_gmin,E0,E1,g_min\n";
    nlohmann::json sweep = nlohmann::json::array();
    for (double a : config.alpha_sweep) {
      const auto hp = build_problem_hamiltonian(encode_qubo(matrix, a, config.k));
      const auto scan = find_gap_minimum(h0, hp, schedule);
      const auto levels = spectrum(interpolate(h0, hp, scan.s_at_gmin));
      out << format_double(a) << ',' << format_double(scan.s_at_gmin) << ','
          << format_double(levels.values[0]) << ',' << format_double(levels.values[1]) << ','
          << format_double(scan.g_min) << '\n';
      sweep.push_back({{"alpha", a},
                       {"s_at_gmin", scan.s_at_gmin},
                       {"g_min", scan.g_min},
                       {"degenerate", scan.g_min <= kGapFloor}});
    }
    report["alpha_sweep"] = sweep;
  }

  const auto hp = build_problem_hamiltonian(encode_qubo(matrix, alpha, config.k));
  const auto scan = find_gap_minimum(h0, hp, schedule);
  {
    auto out = open_output(config, "gap_scan.csv");
    write_gap_csv(out, scan.profile);
  }
  report["g_min"] = scan.g_min;
  report["s_at_gmin"] = scan.s_at_gmin;
  report["wall_clock_seconds"] = elapsed_seconds(start);
  write_json(config, "scan_report.json", report);
  if (scan.g_min <= kGapFloor) {
    throw DegenerateGapError("spectral gap closes at s = " + format_double(scan.s_at_gmin) +
                             "; raise --alpha or change --k");
  }
  return report;
}

std::vector<double> parse_alpha_range(const std::string& text) {
  auto number = [&](std::string_view field) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw ConfigError("malformed alpha range '" + text + "'");
    }
    return v;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
      const auto end = s.find(sep, begin);
      parts.emplace_back(s.data() + begin, (end == std::string::npos ? s.size() : end) - begin);
      if (end == std::string::npos) break;
      begin = end + 1;
    }
    return parts;
  };

  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("alpha range must be start:stop:step");
    const double first = number(parts[0]);
    const double last = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0)) throw ConfigError("alpha range step must be positive");
    const double slack = 1e-9 * step;
    for (std::size_t i = 0;; ++i) {
      const double v = first + static_cast<double>(i) * step;
      if (v > last + slack) break;
      values.push_back(v);
    }
  } else if (!text.empty()) {
    for (auto part : split(text, ',')) values.push_back(number(part));
  }
  if (values.empty()) throw ConfigError("alpha range '" + text + "' is empty");
  for (double v : values) {
    if (!(v >= 0.0)) throw ConfigError("alpha values must be non-negative");
  }
  return values;
}

}  // namespace qafs
