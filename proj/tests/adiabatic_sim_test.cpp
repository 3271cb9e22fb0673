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

#include "qafs/adiabatic_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qafs/error.hpp"
#include "qafs/exact_oracle.hpp"
#include "test_support.hpp"

namespace qafs {
namespace {

using testing::analytic_gap;
using testing::analytic_pair;

// Seeded n-qubit instance with the default mixer.
std::pair<DenseHamiltonian, DenseHamiltonian> seeded_instance(std::uint64_t seed, std::size_t n,
                                                              double alpha, std::size_t k) {
  std::mt19937_64 rng(seed);
  const auto m = testing::random_mi_matrix(rng, n);
  return {build_mixer(n), build_problem_hamiltonian(encode_qubo(m, alpha, k))};
}

// ---------------------------------------------------------------------------
// spectrum / gap
// ---------------------------------------------------------------------------

TEST(Spectrum, Examples) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = -1;
  d(1, 1) = 1;
  auto v = spectrum(DenseHamiltonian(1, d, "problem")).values;
  EXPECT_NEAR(v[0], -1.0, 1e-14);
  EXPECT_NEAR(v[1], 1.0, 1e-14);

  const auto [x, mz] = analytic_pair();
  v = spectrum(x).values;
  EXPECT_NEAR(v[0], -1.0, 1e-14);
  EXPECT_NEAR(v[1], 1.0, 1e-14);

  v = spectrum(interpolate(x, mz, 0.5)).values;
  EXPECT_NEAR(v[0], -1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(v[1], 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(Spectrum, ResidualAndOrdering) {
  const auto [h0, hp] = seeded_instance(3, 4, 1.0, 2);
  const auto h = interpolate(h0, hp, 0.37);
  const auto spec = spectrum(h, true);
  const double scale = spectral_norm(h.matrix());
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    if (i > 0) {
      EXPECT_LE(spec.values[i - 1], spec.values[i]);
    }
    const Eigen::VectorXcd r = h.matrix() * spec.vectors.col(i) - spec.values[i] * spec.vectors.col(i);
    EXPECT_LE(r.norm(), 1e-9 * scale);
  }
}

TEST(GapAt, AnalyticInstance) {
  const auto [x, mz] = analytic_pair();
  EXPECT_NEAR(gap_at(x, mz, 0.5), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(gap_at(x, mz, 0.0), 2.0, 1e-14);
  EXPECT_NEAR(gap_at(x, mz, 1.0), 2.0, 1e-14);
  EXPECT_THROW(gap_at(x, mz, 1.5), DomainError);
}

TEST(ScanGap, AnalyticMinimum) {
  const auto [x, mz] = analytic_pair();
  const auto scan = scan_gap(x, mz, Schedule::gap_scan());
  ASSERT_EQ(scan.profile.s.size(), 201u);
  EXPECT_NEAR(scan.g_min, std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(scan.s_at_gmin, 0.5, 1e-8);
  for (std::size_t i = 0; i < scan.profile.s.size(); ++i) {
    EXPECT_NEAR(scan.profile.gap[i], analytic_gap(scan.profile.s[i]), 1e-8);
  }
}

TEST(ScanGap, DegenerateProblemGroundStateThrows) {
  // Zero MI matrix with k = 1: the two one-hot states tie at the bottom.
  const auto hp = build_problem_hamiltonian(encode_qubo(MIMatrix::zeros(2), 1.0, 1));
  EXPECT_THROW(scan_gap(build_mixer(2), hp, Schedule::gap_scan()), DegenerateGapError);
  const auto unchecked = find_gap_minimum(build_mixer(2), hp, Schedule::gap_scan());
  EXPECT_LE(unchecked.g_min, kGapFloor);
  EXPECT_NEAR(unchecked.s_at_gmin, 1.0, 1e-12);
}

TEST(ScanGap, SeededInstanceMatchesFineGrid) {
  const auto [h0, hp] = seeded_instance(17, 3, 1.0, 1);
  const auto scan = scan_gap(h0, hp, Schedule::gap_scan());
  const auto fine = gap_profile(h0, hp, Schedule::gap_scan(2001));
  const double fine_min = *std::min_element(fine.gap.begin(), fine.gap.end());
  EXPECT_NEAR(scan.g_min, fine_min, 1e-6);
  EXPECT_LE(scan.g_min, fine_min + 1e-12);
}

TEST(ScanGap, SpectralContinuity) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto [h0, hp] = seeded_instance(seed, 3, 1.0, 1);
    const double lip = spectral_norm(hp.matrix() - h0.matrix());
    const auto profile = gap_profile(h0, hp, Schedule::gap_scan());
    for (std::size_t i = 1; i < profile.s.size(); ++i) {
      const double ds = profile.s[i] - profile.s[i - 1];
      EXPECT_LE(std::abs(profile.gap[i] - profile.gap[i - 1]), 2.0 * lip * ds + 1e-12);
      EXPECT_GE(profile.gap[i], 0.0);
    }
  }
}

TEST(ScheduleType, Validation) {
  Schedule s;
  s.grid = {0.0, 0.5, 0.4, 1.0};
  EXPECT_THROW(s.validate(), ConfigError);
  s.grid = {0.1, 1.0};
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(Schedule::gap_scan(1), ConfigError);
  EXPECT_NO_THROW(Schedule::global_linear(2.0, 10).validate());
}

// ---------------------------------------------------------------------------
// states and overlaps
// ---------------------------------------------------------------------------

TEST(InitialState, Examples) {
  const auto one = initial_state(1);
  EXPECT_NEAR(one[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(one[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
  const auto two = initial_state(2);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(two[i], Complex(0.5, 0.0));
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_NEAR(initial_state(n).norm(), 1.0, 1e-12);
  EXPECT_THROW(initial_state(kMaxDenseQubits + 1), CapacityError);
}

TEST(EndpointChecks, UniformGroundStateAtZeroBasisVectorAtOne) {
  const auto [h0, hp] = seeded_instance(5, 3, 1.0, 1);
  const auto start = spectrum(interpolate(h0, hp, 0.0), true);
  EXPECT_NEAR(std::norm(start.vectors.col(0).dot(initial_state(3))), 1.0, 1e-12);
  const auto end = spectrum(interpolate(h0, hp, 1.0), true);
  EXPECT_TRUE(interpolate(h0, hp, 1.0).is_diagonal());
  EXPECT_NEAR(end.vectors.col(0).cwiseAbs().maxCoeff(), 1.0, 1e-12);
}

TEST(SuccessProbability, Examples) {
  const auto psi0 = initial_state(1);
  EXPECT_NEAR(success_probability(psi0, psi0), 1.0, 1e-15);
  const auto minus = testing::minus_state();
  EXPECT_NEAR(success_probability(minus, psi0), 0.0, 1e-15);
  const Eigen::VectorXcd mix = (psi0 + minus) / std::sqrt(2.0);
  EXPECT_NEAR(success_probability(mix, psi0), 0.5, 1e-15);
}

TEST(GroundFidelity, Examples) {
  const auto [x, mz] = analytic_pair();
  EXPECT_NEAR(ground_fidelity(testing::minus_state(), x), 1.0, 1e-14);
  EXPECT_NEAR(ground_fidelity(initial_state(1), x), 0.0, 1e-14);

  // Two-dimensional ground space spanned by |01> and |10>.
  const auto hp = build_problem_hamiltonian(encode_qubo(MIMatrix::zeros(2), 1.0, 1));
  Eigen::VectorXcd inside = Eigen::VectorXcd::Zero(4);
  inside[1] = Complex(0.6, 0.0);
  inside[2] = Complex(0.0, 0.8);
  EXPECT_NEAR(ground_fidelity(inside, hp), 1.0, 1e-14);
}

// ---------------------------------------------------------------------------
// time bounds
// ---------------------------------------------------------------------------

TEST(GlobalTimeBound, AnalyticInstance) {
  const auto [x, mz] = analytic_pair();
  const double norm = spectral_norm(mz.matrix() - x.matrix());
  EXPECT_NEAR(norm, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(global_time_bound(std::sqrt(2.0), norm), std::sqrt(2.0) / 2.0, 1e-14);
  EXPECT_THROW(global_time_bound(0.0, 1.0), DegenerateGapError);
}

TEST(GlobalTimeBound, SeededInstanceMatchesPowerIteration) {
  const auto [h0, hp] = seeded_instance(23, 3, 1.0, 1);
  const auto scan = scan_gap(h0, hp, Schedule::gap_scan());
  const Eigen::MatrixXcd dh = hp.matrix() - h0.matrix();
  const double oracle_norm = testing::power_iteration_norm(dh);
  EXPECT_NEAR(spectral_norm(dh), oracle_norm, 1e-9 * oracle_norm);
  EXPECT_NEAR(global_time_bound(scan.g_min, spectral_norm(dh)),
              oracle_norm / (scan.g_min * scan.g_min), 1e-8);
}

TEST(LocalDelay, AnalyticIntegral) {
  const auto [x, mz] = analytic_pair();
  const auto fine = gap_profile(x, mz, Schedule::gap_scan(2001));
  // Closed form: arctan(2s - 1) / 4 over [0, 1].
  EXPECT_NEAR(local_delay_integral(fine.s, fine.gap, 1.0), std::numbers::pi / 8.0, 1e-6);
  const auto coarse = gap_profile(x, mz, Schedule::gap_scan(2));
  EXPECT_GT(std::abs(local_delay_integral(coarse.s, coarse.gap, 1.0) - std::numbers::pi / 8.0),
            1e-2);
}

TEST(LocalDelay, ConstantGap) {
  const std::vector<double> s{0.0, 0.25, 0.5, 1.0};
  const std::vector<double> g(4, 2.0);
  EXPECT_NEAR(local_delay_integral(s, g, 1.0), 0.25, 1e-15);
  const std::vector<double> zero{2.0, 0.0, 2.0, 2.0};
  EXPECT_THROW(local_delay_integral(s, zero, 1.0), DegenerateGapError);
}

TEST(LocalDelay, RefinementConverges) {
  const auto [x, mz] = analytic_pair();
  const auto delay = converged_local_delay(x, mz, 1.0);
  EXPECT_TRUE(delay.converged);
  EXPECT_NEAR(delay.value, std::numbers::pi / 8.0, 1e-6);
}

TEST(DefaultSteps, Rule) {
  EXPECT_EQ(default_steps(1.0, 1.0), 1000u);
  EXPECT_EQ(default_steps(100.0, 2.0), 4000u);
  EXPECT_EQ(default_steps(100.0, 0.51), 1020u);
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

TEST(Evolve, CommutingCaseIsGlobalPhase) {
  const auto h0 = build_mixer(2);
  const double t = 3.7;
  const auto trace = evolve(h0, h0, t, 200);
  const Eigen::VectorXcd expected = std::polar(1.0, 2.0 * t) * trace.initial_state;
  EXPECT_NEAR(std::norm(trace.initial_state.dot(initial_state(2))), 1.0, 1e-12);
  EXPECT_LT((trace.final_state - expected).norm(), 1e-10);
  for (const auto& p : trace.points) EXPECT_NEAR(p.success_prob, 1.0, 1e-12);
}

TEST(Evolve, AnalyticInstanceAdiabaticAtT50) {
  const auto [x, mz] = analytic_pair();
  const auto trace = evolve(x, mz, 50.0, 2000);
  EXPECT_GE(trace.points.back().ground_fidelity, 0.999);
  EXPECT_EQ(trace.points.size(), 2001u);
  EXPECT_DOUBLE_EQ(trace.points.back().s, 1.0);
  ASSERT_FALSE(trace.candidates.empty());
  EXPECT_EQ(trace.candidates[0].basis_index, 0u);
}

TEST(Evolve, NormPreservedEverywhere) {
  const auto [h0, hp] = seeded_instance(41, 3, 1.0, 1);
  for (auto method : {StepExponential::kEigendecomposition, StepExponential::kTaylor}) {
    EvolveOptions options;
    options.step_exponential = method;
    options.initial_state = initial_state(3);
    const auto trace = evolve(h0, hp, 20.0, 1500, options);
    EXPECT_LE(trace.max_norm_deviation, 1e-9);
    for (const auto& p : trace.points) {
      EXPECT_NEAR(p.norm, 1.0, 1e-9);
      EXPECT_GE(p.gap, 0.0);
    }
  }
}

TEST(Evolve, TaylorMatchesEigendecomposition) {
  const auto [h0, hp] = seeded_instance(8, 3, 2.0, 2);
  EvolveOptions exact;
  EvolveOptions taylor;
  taylor.step_exponential = StepExponential::kTaylor;
  const auto a = evolve(h0, hp, 15.0, 1200, exact);
  const auto b = evolve(h0, hp, 15.0, 1200, taylor);
  EXPECT_LT(testing::phase_aligned_distance(a.final_state, b.final_state), 1e-11);
}

TEST(Evolve, RecordStrideKeepsEndpoints) {
  const auto [x, mz] = analytic_pair();
  EvolveOptions options;
  options.record_stride = 300;
  const auto trace = evolve(x, mz, 5.0, 1000, options);
  ASSERT_EQ(trace.points.size(), 5u);  // 0, 300, 600, 900, 1000
  EXPECT_EQ(trace.points.front().s, 0.0);
  EXPECT_EQ(trace.points.back().s, 1.0);
}

TEST(Evolve, MatchesFineReference) {
  const auto [x, mz] = analytic_pair();
  const auto trace = evolve(x, mz, 10.0, 10000);
  const auto reference = evolve_reference(x, mz, 10.0, 100000, trace.initial_state);
  EXPECT_LT(testing::phase_aligned_distance(trace.final_state, reference), 1e-6);
}

TEST(Evolve, RejectsBadArguments) {
  const auto [x, mz] = analytic_pair();
  EXPECT_THROW(evolve(x, mz, 0.0, 10), DomainError);
  EXPECT_THROW(evolve(x, mz, 1.0, 0), ConfigError);
  EvolveOptions options;
  options.initial_state = Eigen::VectorXcd::Constant(2, 1.0);
  EXPECT_THROW(evolve(x, mz, 1.0, 10, options), StateError);
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

TEST(TraceCsv, RoundTripsExactly) {
  const auto [h0, hp] = seeded_instance(2, 2, 1.0, 1);
  EvolveOptions options;
  options.record_stride = 50;
  const auto trace = evolve(h0, hp, 7.0, 1000, options);
  std::stringstream buffer;
  write_trace_csv(buffer, trace.points);
  EXPECT_EQ(buffer.str().substr(0, buffer.str().find('\n')),
            "s,E0,E1,gap,norm,success_prob,ground_fidelity");
  const auto back = read_trace_csv(buffer);
  ASSERT_EQ(back.size(), trace.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].s, trace.points[i].s);
    EXPECT_EQ(back[i].e0, trace.points[i].e0);
    EXPECT_EQ(back[i].e1, trace.points[i].e1);
    EXPECT_EQ(back[i].gap, trace.points[i].gap);
    EXPECT_EQ(back[i].norm, trace.points[i].norm);
    EXPECT_EQ(back[i].success_prob, trace.points[i].success_prob);
    EXPECT_EQ(back[i].ground_fidelity, trace.points[i].ground_fidelity);
  }
}

TEST(TraceJson, RoundTripsExactly) {
  TracePoint p{0.125, -1.0 / 3.0, 0.7, 1.0333333333333332, 1.0000000000000002, 0.1, 0.9};
  const nlohmann::json j = p;
  const auto back = nlohmann::json::parse(j.dump()).get<TracePoint>();
  EXPECT_EQ(back.e0, p.e0);
  EXPECT_EQ(back.gap, p.gap);
  EXPECT_EQ(back.norm, p.norm);
}

TEST(GapCsv, RoundTripsExactly) {
  const auto [x, mz] = analytic_pair();
  const auto profile = gap_profile(x, mz, Schedule::gap_scan(31));
  std::stringstream buffer;
  write_gap_csv(buffer, profile);
  const auto back = read_gap_csv(buffer);
  EXPECT_EQ(back.s, profile.s);
  EXPECT_EQ(back.e0, profile.e0);
  EXPECT_EQ(back.e1, profile.e1);
  EXPECT_EQ(back.gap, profile.gap);
}

TEST(TraceCsv, MalformedRowIsParseError) {
  std::istringstream in("s,E0,E1,gap,norm,success_prob,ground_fidelity\n0,1,2\n");
  EXPECT_THROW(read_trace_csv(in), ParseError);
}

}  // namespace
}  // namespace qafs
