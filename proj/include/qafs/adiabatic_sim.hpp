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
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qafs/ising_encoder.hpp"

namespace qafs {

inline constexpr std::size_t kDefaultGridPoints = 201;
inline constexpr double kDefaultSafetyFactor = 10.0;
/// Levels closer than this are treated as one degenerate level.
inline constexpr double kDegeneracyTolerance = 1e-9;
/// Gaps at or below this are level crossings.
inline constexpr double kGapFloor = 1e-12;

enum class ScheduleKind { kGlobalLinear, kGapScanOnly };

/// Strictly increasing grid over [0, 1] with s = t / T.
struct Schedule {
  double total_time = 1.0;
  std::vector<double> grid;
  ScheduleKind kind = ScheduleKind::kGapScanOnly;

  static Schedule gap_scan(std::size_t points = kDefaultGridPoints);
  static Schedule global_linear(double total_time, std::size_t steps);
  void validate() const;
};

struct Spectrum {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns match `values`; empty unless requested
};

/// Full ascending spectrum of a Hermitian matrix. Real symmetric inputs take
/// the real eigensolver.
Spectrum spectrum(const DenseHamiltonian& h, bool with_vectors = false);

/// E1 - E0 of the interpolated Hamiltonian at s.
double gap_at(const DenseHamiltonian& h0, const DenseHamiltonian& hp, double s);

/// Per-grid-point lowest two levels, no refinement or degeneracy check.
struct GapProfile {
  std::vector<double> s;
  std::vector<double> e0;
  std::vector<double> e1;
  std::vector<double> gap;
};

GapProfile gap_profile(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                       const Schedule& schedule);

struct GapScan {
  GapProfile profile;
  double g_min = 0.0;
  double s_at_gmin = 0.0;
};

/// Gap profile plus a golden-section refinement of the minimum, without the
/// degeneracy check.
GapScan find_gap_minimum(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                         const Schedule& schedule);

/// Gap profile plus a golden-section refinement of the minimum (absolute
/// tolerance 1e-8 in s) inside the bracketing grid interval. Throws
/// DegenerateGapError when g_min <= 1e-12.
GapScan scan_gap(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                 const Schedule& schedule);

/// Uniform superposition over n qubits.
Eigen::VectorXcd initial_state(std::size_t n);

/// |<psi0|state>|^2.
double success_probability(const Eigen::VectorXcd& state, const Eigen::VectorXcd& psi0);

/// Squared overlap with the ground eigenspace (levels within 1e-9 of E0).
double ground_fidelity(const Eigen::VectorXcd& state, const DenseHamiltonian& h);

/// Largest absolute eigenvalue of a Hermitian matrix.
double spectral_norm(const Eigen::MatrixXcd& h);

/// Global delay factor norm_dHds / g_min^2.
double global_time_bound(double g_min, double norm_dHds);

/// Trapezoidal integral of norm_dHds / g(s)^2 over the sampled grid.
double local_delay_integral(std::span<const double> s, std::span<const double> gaps,
                            double norm_dHds);

struct LocalDelay {
  double value = 0.0;
  std::size_t grid_points = 0;
  bool converged = false;
};

/// Doubles the grid (starting from `initial_points`) until the integral
/// changes by less than 1e-6 relative, or `max_points` is reached.
LocalDelay converged_local_delay(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                                 double norm_dHds, std::size_t initial_points = kDefaultGridPoints,
                                 std::size_t max_points = 65537);

/// max(1000, ceil(20 T norm_dHds)).
std::size_t default_steps(double total_time, double norm_dHds);

struct TracePoint {
  double s = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  double norm = 1.0;
  double success_prob = 1.0;
  double ground_fidelity = 0.0;
};

struct EvolutionTrace {
  std::vector<TracePoint> points;
  double total_time = 0.0;
  std::size_t steps = 0;
  /// Largest | ||psi|| - 1 | over every step, recorded or not.
  double max_norm_deviation = 0.0;
  double g_min = 0.0;      // over recorded points
  double s_at_gmin = 0.0;  // over recorded points
  Eigen::VectorXcd initial_state;
  Eigen::VectorXcd final_state;
  std::vector<ReadoutEntry> candidates;
};

/// How each step's exp(-i H dt) is evaluated. Both are exact to double
/// precision; they differ only in cost.
enum class StepExponential {
  kEigendecomposition,  // dense eigensolver per step
  kTaylor,              // scaled Taylor series on sparse H0, Hp
};

struct EvolveOptions {
  /// Defaults to the ground state of h0.
  std::optional<Eigen::VectorXcd> initial_state;
  /// Spectral diagnostics are recorded every `record_stride` steps; the first
  /// and last points are always recorded.
  std::size_t record_stride = 1;
  double readout_tolerance = 1e-3;
  StepExponential step_exponential = StepExponential::kEigendecomposition;
};

/**
 * Integrates i d/dt |psi> = H(t/T) |psi> over [0, T] with the exponential
 * midpoint rule: each step applies exp(-i H(s_mid) dt), evaluated exactly
 * through the eigendecomposition of H(s_mid) or, with
 * StepExponential::kTaylor, a Taylor series summed to machine precision
 * after scaling the step so that ||H dt||_1 <= 1/2.
 *
 * Throws NumericalError if the state stops being finite.
 */
EvolutionTrace evolve(const DenseHamiltonian& h0, const DenseHamiltonian& hp, double total_time,
                      std::size_t steps, const EvolveOptions& options = {});

void write_trace_csv(std::ostream& out, std::span<const TracePoint> points);
std::vector<TracePoint> read_trace_csv(std::istream& in);

void write_gap_csv(std::ostream& out, const GapProfile& profile);
GapProfile read_gap_csv(std::istream& in);

void to_json(nlohmann::json& j, const TracePoint& p);
void from_json(const nlohmann::json& j, TracePoint& p);

}  // namespace qafs
