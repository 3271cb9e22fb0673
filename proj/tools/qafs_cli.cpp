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

// qafs: adiabatic k-of-n feature selection from the command line.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical or
// degenerate-gap error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qafs/error.hpp"
#include "qafs/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CliOptions {
  std::string input;
  bool synthetic = false;
  std::string alpha = "auto";
  std::string delimiter = ",";
  std::string alpha_range;
  std::size_t planted = 0;
  std::size_t curve_max = 0;
  double time = 0.0;
};

void add_common(CLI::App* cmd, qafs::RunConfig& config, CliOptions& cli) {
  cmd->add_option("--input", cli.input, "Delimited data file with a header row");
  cmd->add_flag("--synthetic", cli.synthetic, "Use seeded standard-normal synthetic features");
  cmd->add_option("--target", config.target, "Name of the class column (with --input)");
  cmd->add_option("--delimiter", cli.delimiter, "Field delimiter")->capture_default_str();
  cmd->add_option("--bins", config.bins, "Equal-width bins for real columns")
      ->capture_default_str();
  cmd->add_flag("--normalize", config.normalize, "Scale the MI matrix to sum to one");
  cmd->add_option("--features", config.synthetic_features, "Synthetic feature count")
      ->capture_default_str();
  cmd->add_option("--samples", config.synthetic_samples, "Synthetic sample count")
      ->capture_default_str();
  cmd->add_option("--plant", cli.planted, "Make this synthetic feature a copy of the target");
  cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
}

void add_selection(CLI::App* cmd, qafs::RunConfig& config, CliOptions& cli) {
  cmd->add_option("--alpha", cli.alpha, "Penalty strength, or 'auto'")->capture_default_str();
  cmd->add_option("--k", config.k, "Number of features to select")->capture_default_str();
  cmd->add_option("--grid", config.grid_points, "Gap-scan grid points")->capture_default_str();
}

void add_evolution(CLI::App* cmd, qafs::RunConfig& config, CliOptions& cli) {
  cmd->add_option("--safety", config.safety, "T = safety / g_min^2")->capture_default_str();
  cmd->add_option("--time", cli.time, "Override the total evolution time T");
  cmd->add_option("--readout-tol", config.readout_tolerance,
                  "Smallest probability listed among readout candidates")
      ->capture_default_str();
  cmd->add_option("--trace-points", config.max_trace_points, "Maximum recorded trace rows")
      ->capture_default_str();
}

void finish_config(CLI::App* cmd, qafs::RunConfig& config, const CliOptions& cli) {
  if (cmd->count("--input")) config.input = cli.input;
  config.synthetic = cli.synthetic;
  if (cli.delimiter.size() != 1) throw qafs::ConfigError("--delimiter must be one character");
  config.delimiter = cli.delimiter.front();
  if (cmd->count("--plant")) config.planted_feature = cli.planted;
  if (cmd->get_option_no_throw("--alpha") != nullptr && cli.alpha != "auto") {
    try {
      std::size_t used = 0;
      config.alpha = std::stod(cli.alpha, &used);
      if (used != cli.alpha.size()) throw std::invalid_argument(cli.alpha);
    } catch (const std::logic_error&) {
      throw qafs::ConfigError("--alpha must be a number or 'auto'");
    }
  }
  if (cmd->get_option_no_throw("--time") != nullptr && cmd->count("--time")) {
    config.time_override = cli.time;
  }
  if (cmd->get_option_no_throw("--curve-max") != nullptr && cmd->count("--curve-max")) {
    config.curve_max = cli.curve_max;
  }
  if (cmd->get_option_no_throw("--alpha-range") != nullptr && cmd->count("--alpha-range")) {
    config.alpha_sweep = qafs::parse_alpha_range(cli.alpha_range);
  }
  config.validate();
}

void print_selection(const nlohmann::json& r) {
  std::cout << "selected features: " << r["selected"]["indices"].dump() << " (bits "
            << r["selected"]["bits"].get<std::string>() << ")\n"
            << "alpha = " << r["alpha"] << ", g_min = " << r["g_min"]
            << " at s = " << r["s_at_gmin"] << "\n"
            << "gamma = " << r["gamma"] << ", local integral = " << r["local_integral"] << "\n"
            << "T = " << r["total_time"] << " over " << r["steps"] << " steps\n"
            << "success probability = " << r["final_success_prob"]
            << ", ground-state fidelity = " << r["final_ground_fidelity"] << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic quantum feature selection simulator"};
  app.require_subcommand(1);

  qafs::RunConfig config;
  CliOptions cli;

  auto* mi = app.add_subcommand("mi", "Compute the mutual-information matrix");
  add_common(mi, config, cli);

  auto* select = app.add_subcommand("select", "Run adiabatic feature selection");
  add_common(select, config, cli);
  add_selection(select, config, cli);
  add_evolution(select, config, cli);

  auto* compare = app.add_subcommand("compare", "Adiabatic selection against brute force");
  add_common(compare, config, cli);
  add_selection(compare, config, cli);
  add_evolution(compare, config, cli);
  compare->add_option("--curve-max", cli.curve_max, "Largest m in the complexity curve");

  auto* scan = app.add_subcommand("scan", "Emit spectral-gap traces");
  add_common(scan, config, cli);
  add_selection(scan, config, cli);
  scan->add_option("--alpha-range", cli.alpha_range,
                   "Alpha sweep as start:stop:step or a comma-separated list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (mi->parsed()) {
      finish_config(mi, config, cli);
      const auto r = qafs::cmd_mi(config);
      std::cout << "n = " << r["n"] << ", total MI = " << r["sum"] << " bits\n"
                << "relevance: " << r["relevance"].dump() << "\n";
    } else if (select->parsed()) {
      finish_config(select, config, cli);
      print_selection(qafs::cmd_select(config));
    } else if (compare->parsed()) {
      finish_config(compare, config, cli);
      const auto r = qafs::cmd_compare(config);
      print_selection(r["select"]);
      std::cout << "oracle optimum: " << r["oracle"]["optimal"].dump() << "\n"
                << "match = " << (r["match"].get<bool>() ? "true" : "false")
                << (r["diabatic_failure"].get<bool>() ? " (diabatic failure)" : "") << "\n";
    } else if (scan->parsed()) {
      finish_config(scan, config, cli);
      const auto r = qafs::cmd_scan(config);
      std::cout << "g_min = " << r["g_min"] << " at s = " << r["s_at_gmin"] << "\n";
    }
  } catch (const qafs::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qafs::DegenerateGapError& e) {
    std::cerr << "degenerate gap: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qafs::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qafs::StateError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qafs::MatrixError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qafs::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
