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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qafs/adiabatic_sim.hpp"
#include "qafs/error.hpp"
#include "qafs/exact_oracle.hpp"
#include "qafs/ising_encoder.hpp"
#include "qafs/mi_engine.hpp"
#include "qafs/pipeline.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qafs;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Largest |norm - 1| over every evolution step run by the suite.
double g_worst_norm_deviation = 0.0;
std::size_t g_evolutions = 0;

void note_trace(const EvolutionTrace& trace) {
  ++g_evolutions;
  g_worst_norm_deviation = std::max(g_worst_norm_deviation, trace.max_norm_deviation);
  for (const auto& p : trace.points) {
    g_worst_norm_deviation = std::max(g_worst_norm_deviation, std::abs(p.norm - 1.0));
  }
}

std::vector<std::uint64_t> basis_indices(const std::vector<FeatureSubset>& subsets) {
  std::vector<std::uint64_t> out;
  for (const auto& s : subsets) out.push_back(s.basis_index());
  return out;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(QAFS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// AC1: encoder and brute force agree on the optimum set.
Outcome encoder_oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> pick_n(2, 8);
  const std::vector<std::optional<double>> alphas{0.0, 1.0, 10.0, std::nullopt};
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = pick_n(rng);
    const auto m = testing::random_mi_matrix(rng, n);
    const double alpha = alphas[trial % alphas.size()].value_or(alpha_star(m));
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    const auto ground =
        exact_ground_states(build_problem_hamiltonian(encode_qubo(m, alpha, k)), 1e-9);
    if (ground.indices != basis_indices(brute_force_select(m, alpha, k).optimal)) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 60.0,
          "100 instances, " + std::to_string(mismatches) + " mismatches, " + fmt(elapsed) + " s"};
}

// AC2: gap of sigma_x -> -sigma_z against its closed form.
Outcome analytic_gap_anchor() {
  const auto [x, mz] = testing::analytic_pair();
  const auto scan = scan_gap(x, mz, Schedule::gap_scan());
  double worst = 0.0;
  for (std::size_t i = 0; i < scan.profile.s.size(); ++i) {
    worst = std::max(worst, std::abs(scan.profile.gap[i] - testing::analytic_gap(scan.profile.s[i])));
  }
  const double gmin_err = std::abs(scan.g_min - std::sqrt(2.0));
  const double s_err = std::abs(scan.s_at_gmin - 0.5);
  return {worst <= 1e-8 && gmin_err <= 1e-8 && s_err <= 1e-8,
          "pointwise " + fmt(worst) + ", g_min err " + fmt(gmin_err) + ", s err " + fmt(s_err)};
}

// AC3: local-delay integral with unit numerator equals pi/8.
Outcome analytic_local_delay_anchor() {
  const auto [x, mz] = testing::analytic_pair();
  const auto profile = gap_profile(x, mz, Schedule::gap_scan(2001));
  const double value = local_delay_integral(profile.s, profile.gap, 1.0);
  const double err = std::abs(value - std::numbers::pi / 8.0);
  return {err <= 1e-6, "2001 points, |I - pi/8| = " + fmt(err)};
}

struct Instance {
  DenseHamiltonian h0;
  DenseHamiltonian hp;
  double gamma;
  double norm;
};

// AC4: fidelity at T = 10 gamma is >= 0.99 and beats T = gamma / 10.
Outcome adiabatic_convergence() {
  std::vector<Instance> instances;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> pick_n(2, 4);
  while (instances.size() < 10) {
    const std::size_t n = pick_n(rng);
    const auto m = testing::random_mi_matrix(rng, n);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    auto h0 = build_mixer(n);
    auto hp = build_problem_hamiltonian(encode_qubo(m, 1.0, k));
    GapScan scan;
    try {
      scan = scan_gap(h0, hp, Schedule::gap_scan());
    } catch (const DegenerateGapError&) {
      continue;
    }
    const double norm = spectral_norm(hp.matrix() - h0.matrix());
    instances.push_back({std::move(h0), std::move(hp), global_time_bound(scan.g_min, norm), norm});
  }

  int failures = 0;
  double worst_slow = 1.0;
  double slowest = 0.0;
  for (const auto& inst : instances) {
    const auto start = Clock::now();
    EvolveOptions options;
    options.initial_state = initial_state(inst.h0.qubits());
    options.step_exponential = StepExponential::kTaylor;
    options.record_stride = 1000;
    const double t_slow = 10.0 * inst.gamma;
    const double t_fast = 0.1 * inst.gamma;
    const auto slow = evolve(inst.h0, inst.hp, t_slow, default_steps(t_slow, inst.norm), options);
    const auto fast = evolve(inst.h0, inst.hp, t_fast, default_steps(t_fast, inst.norm), options);
    note_trace(slow);
    note_trace(fast);
    const double elapsed = seconds_since(start);
    const double f_slow = slow.points.back().ground_fidelity;
    const double f_fast = fast.points.back().ground_fidelity;
    worst_slow = std::min(worst_slow, f_slow);
    slowest = std::max(slowest, elapsed);
    if (!(f_slow >= 0.99 && f_slow > f_fast && elapsed < 30.0)) ++failures;
  }
  return {failures == 0, "10 instances, min fidelity at 10 gamma " + fmt(worst_slow) +
                             ", slowest " + fmt(slowest) + " s, " + std::to_string(failures) +
                             " failures"};
}

// AC6: halving the step shrinks the error against a fine reference by about 4.
Outcome integrator_order() {
  std::mt19937_64 rng(6);
  const auto m = testing::random_mi_matrix(rng, 2);
  const auto h0 = build_mixer(2);
  const auto hp = build_problem_hamiltonian(encode_qubo(m, 1.0, 1));
  const double t = 5.0;
  const std::size_t coarse = 100;
  const auto psi0 = initial_state(2);
  EvolveOptions options;
  options.initial_state = psi0;
  const auto a = evolve(h0, hp, t, coarse, options);
  const auto b = evolve(h0, hp, t, 2 * coarse, options);
  note_trace(a);
  note_trace(b);
  const auto reference = evolve_reference(h0, hp, t, 200 * coarse, psi0);
  const double err_a = testing::phase_aligned_distance(a.final_state, reference);
  const double err_b = testing::phase_aligned_distance(b.final_state, reference);
  const double ratio = err_a / err_b;
  return {ratio >= 3.5 && ratio <= 4.5, "errors " + fmt(err_a) + " / " + fmt(err_b) +
                                            ", ratio " + fmt(ratio)};
}

// AC7: MI symmetry, non-negativity, product zero, fair-bit value.
Outcome mi_properties() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  double worst_sym = 0.0;
  double most_negative = 0.0;
  double worst_product = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto j = testing::random_joint(rng, size(rng), size(rng));
    const double mi = mutual_information(j);
    worst_sym = std::max(worst_sym, std::abs(mi - mutual_information(j.transposed())));
    most_negative = std::min(most_negative, mi);
    auto product = j;
    const auto pa = j.marginal_a();
    const auto pb = j.marginal_b();
    for (std::size_t r = 0; r < pa.size(); ++r) {
      for (std::size_t c = 0; c < pb.size(); ++c) product.probabilities[r][c] = pa[r] * pb[c];
    }
    // Renormalize away rounding so the table stays valid.
    double total = 0.0;
    for (const auto& row : product.probabilities) {
      for (double p : row) total += p;
    }
    for (auto& row : product.probabilities) {
      for (double& p : row) p /= total;
    }
    worst_product = std::max(worst_product, std::abs(mutual_information(product)));
  }
  JointDistribution fair;
  fair.support_a = {0, 1};
  fair.support_b = {0, 1};
  fair.probabilities = {{0.5, 0.0}, {0.0, 0.5}};
  const double bit_err = std::abs(mutual_information(fair) - 1.0);
  const bool pass =
      worst_sym <= 1e-12 && most_negative >= -1e-12 && worst_product <= 1e-12 && bit_err <= 1e-12;
  return {pass, "1000 tables, asym " + fmt(worst_sym) + ", min " + fmt(most_negative) +
                    ", product " + fmt(worst_product) + ", fair-bit err " + fmt(bit_err)};
}

const std::string kEndToEndFlags = "--synthetic --features 6 --plant 2 --k 1 --alpha auto --seed 7";

// AC8: the planted feature is selected and compare agrees with brute force.
Outcome end_to_end(const fs::path& root) {
  const fs::path select_dir = root / "select";
  const fs::path compare_dir = root / "compare";
  const auto start = Clock::now();
  const int select_code =
      run_cli("select " + kEndToEndFlags + " --out " + select_dir.string());
  const double select_time = seconds_since(start);
  const auto mid = Clock::now();
  const int compare_code =
      run_cli("compare " + kEndToEndFlags + " --out " + compare_dir.string());
  const double compare_time = seconds_since(mid);
  if (select_code != 0 || compare_code != 0) {
    return {false, "exit codes " + std::to_string(select_code) + ", " +
                       std::to_string(compare_code)};
  }
  const auto select = nlohmann::json::parse(slurp(select_dir / "select_report.json"));
  const auto compare = nlohmann::json::parse(slurp(compare_dir / "compare_report.json"));
  g_worst_norm_deviation =
      std::max({g_worst_norm_deviation, select["max_norm_deviation"].get<double>(),
                compare["select"]["max_norm_deviation"].get<double>()});
  g_evolutions += 2;
  const bool picked = select["selected"]["indices"] == nlohmann::json::array({2});
  const bool match = compare["match"].get<bool>();
  const bool fast = select_time < 60.0 && compare_time < 60.0;
  return {picked && match && fast,
          "selected " + select["selected"]["indices"].dump() + ", match " +
              (match ? "true" : "false") + ", select " + fmt(select_time) + " s, compare " +
              fmt(compare_time) + " s"};
}

// AC9: alpha* forces exactly k selected features.
Outcome cardinality_enforcement() {
  std::mt19937_64 rng(9);
  int violations = 0;
  int optima = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const auto m = testing::random_mi_matrix(rng, n, 2.0);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    for (const auto& s : brute_force_select(m, alpha_star(m), k).optimal) {
      ++optima;
      if (s.popcount() != k) ++violations;
    }
  }
  return {violations == 0, "50 instances, " + std::to_string(optima) + " optima, " +
                               std::to_string(violations) + " violations"};
}

// Reports carry a wall-clock field; everything else must match byte for byte.
std::string numeric_content(const fs::path& p) {
  if (p.extension() != ".json") return slurp(p);
  auto j = nlohmann::json::parse(slurp(p));
  j.erase("wall_clock_seconds");
  return j.dump(2);
}

// AC10: a second compare run with the same flags reproduces every output file.
Outcome determinism(const fs::path& root) {
  const fs::path first = root / "compare";
  const fs::path second = root / "compare_again";
  if (run_cli("compare " + kEndToEndFlags + " --out " + second.string()) != 0) {
    return {false, "second compare run failed"};
  }
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(first)) {
    const auto name = entry.path().filename();
    ++files;
    if (!fs::exists(second / name) ||
        numeric_content(entry.path()) != numeric_content(second / name)) {
      differing.push_back(name.string());
    }
  }
  std::string detail = std::to_string(files) + " files compared";
  for (const auto& d : differing) detail += ", differs: " + d;
  return {files > 0 && differing.empty(), detail};
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "qafs_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> check;
  };
  Outcome unitarity;
  const std::vector<Criterion> criteria{
      {"AC1", "encoder-oracle equivalence", encoder_oracle_equivalence},
      {"AC2", "analytic gap anchor", analytic_gap_anchor},
      {"AC3", "analytic local-delay anchor", analytic_local_delay_anchor},
      {"AC4", "adiabatic convergence", adiabatic_convergence},
      {"AC6", "integrator convergence order", integrator_order},
      {"AC7", "MI properties", mi_properties},
      {"AC8", "end-to-end selection", [&] { return end_to_end(root); }},
      {"AC9", "cardinality enforcement", cardinality_enforcement},
      {"AC10", "determinism", [&] { return determinism(root); }},
      {"AC5", "unitarity",
       [] {
         return Outcome{g_evolutions > 0 && g_worst_norm_deviation <= 1e-9,
                        std::to_string(g_evolutions) + " evolutions, max |norm - 1| = " +
                            fmt(g_worst_norm_deviation)};
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << ": "
              << outcome.detail << std::endl;
  }
  fs::remove_all(root);
  std::cout << (failed == 0 ? "all acceptance criteria passed"
                            : std::to_string(failed) + " acceptance criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
