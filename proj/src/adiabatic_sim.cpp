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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Sparse>

#include "qafs/error.hpp"

namespace qafs {

namespace {

bool all_real(const Eigen::MatrixXcd& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

// Hermitian eigensolver; real symmetric input goes through the real solver.
Spectrum eigh(const Eigen::MatrixXcd& m, bool with_vectors) {
  const int options = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  Spectrum out;
  if (all_real(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.real(), options);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    out.values = solver.eigenvalues();
    if (with_vectors) out.vectors = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, options);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    out.values = solver.eigenvalues();
    if (with_vectors) out.vectors = solver.eigenvectors();
  }
  return out;
}

struct LowestTwo {
  double e0;
  double e1;
};

LowestTwo lowest_two(const Eigen::MatrixXcd& h0, const Eigen::MatrixXcd& hp, double s) {
  const Eigen::MatrixXcd h = (1.0 - s) * h0 + s * hp;
  const auto spec = eigh(h, false);
  return {spec.values[0], spec.values[1]};
}

double ground_overlap(const Eigen::VectorXcd& state, const Spectrum& spec) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < spec.values.size(); ++k) {
    if (spec.values[k] - spec.values[0] > kDegeneracyTolerance) break;
    total += std::norm(spec.vectors.col(k).dot(state));
  }
  return total;
}

template <typename Sparse>
double max_column_sum(const Sparse& m) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    double sum = 0.0;
    for (typename Sparse::InnerIterator it(m, c); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

// psi <- exp(-i ((1 - s) A + s B) dt) psi by a scaled Taylor series. Scalar
// is double when both operators are real.
template <typename Scalar>
class TaylorStepper {
 public:
  using Sparse = Eigen::SparseMatrix<Scalar>;

  TaylorStepper(Sparse a, Sparse b)
      : a_(std::move(a)), b_(std::move(b)), norm_a_(max_column_sum(a_)),
        norm_b_(max_column_sum(b_)) {}

  void apply(Eigen::VectorXcd& psi, double s, double dt) {
    h_ = (1.0 - s) * a_ + s * b_;
    const double bound = ((1.0 - s) * norm_a_ + s * norm_b_) * dt;
    const auto pieces = std::max<long>(1, static_cast<long>(std::ceil(bound / 0.5)));
    const double step = dt / static_cast<double>(pieces);
    for (long piece = 0; piece < pieces; ++piece) {
      term_ = psi;
      for (int order = 1; order <= 60; ++order) {
        tmp_.noalias() = h_ * term_;
        term_ = Complex(0.0, -step / order) * tmp_;
        psi += term_;
        if (term_.squaredNorm() <= 1e-34 * psi.squaredNorm()) break;
      }
    }
  }

 private:
  Sparse a_;
  Sparse b_;
  Sparse h_;
  double norm_a_;
  double norm_b_;
  Eigen::VectorXcd term_;
  Eigen::VectorXcd tmp_;
};

void check_pair(const DenseHamiltonian& h0, const DenseHamiltonian& hp) {
  if (h0.dimension() != hp.dimension()) throw ShapeError("Hamiltonians differ in dimension");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<double> parse_csv_numbers(const std::string& line, std::size_t expected,
                                      std::size_t line_no) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    auto end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string_view field(line.data() + start, end - start);
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw ParseError("not a number: '" + std::string(field) + "'", line_no);
    }
    out.push_back(v);
    start = end + 1;
  }
  if (out.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " fields, found " +
                         std::to_string(out.size()),
                     line_no);
  }
  return out;
}

}  // namespace

Schedule Schedule::gap_scan(std::size_t points) {
  if (points < 2) throw ConfigError("a schedule grid needs at least 2 points");
  Schedule schedule;
  schedule.kind = ScheduleKind::kGapScanOnly;
  schedule.grid.resize(points);
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) schedule.grid[i] = static_cast<double>(i) / last;
  return schedule;
}

Schedule Schedule::global_linear(double total_time, std::size_t steps) {
  if (!(total_time > 0.0)) throw DomainError("total evolution time must be positive");
  if (steps == 0) throw ConfigError("evolution needs at least one step");
  Schedule schedule = gap_scan(steps + 1);
  schedule.total_time = total_time;
  schedule.kind = ScheduleKind::kGlobalLinear;
  return schedule;
}

void Schedule::validate() const {
  if (!(total_time > 0.0)) throw DomainError("total evolution time must be positive");
  if (grid.size() < 2) throw ConfigError("a schedule grid needs at least 2 points");
  if (grid.front() != 0.0 || grid.back() != 1.0) {
    throw ConfigError("schedule grid must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("schedule grid must be strictly increasing");
  }
}

Spectrum spectrum(const DenseHamiltonian& h, bool with_vectors) {
  return eigh(h.matrix(), with_vectors);
}

double gap_at(const DenseHamiltonian& h0, const DenseHamiltonian& hp, double s) {
  check_pair(h0, hp);
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("schedule parameter s must lie in [0, 1]");
  const auto [e0, e1] = lowest_two(h0.matrix(), hp.matrix(), s);
  return e1 - e0;
}

GapProfile gap_profile(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                       const Schedule& schedule) {
  check_pair(h0, hp);
  schedule.validate();
  GapProfile profile;
  profile.s = schedule.grid;
  for (double s : schedule.grid) {
    const auto [e0, e1] = lowest_two(h0.matrix(), hp.matrix(), s);
    profile.e0.push_back(e0);
    profile.e1.push_back(e1);
    profile.gap.push_back(e1 - e0);
  }
  return profile;
}

GapScan find_gap_minimum(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                         const Schedule& schedule) {
  GapScan scan;
  scan.profile = gap_profile(h0, hp, schedule);
  const auto& gaps = scan.profile.gap;
  const auto& grid = scan.profile.s;
  const auto best = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) -
                                             gaps.begin());
  scan.g_min = gaps[best];
  scan.s_at_gmin = grid[best];

  // Golden-section refinement inside the bracketing grid interval.
  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  auto gap = [&](double s) {
    const auto [e0, e1] = lowest_two(h0.matrix(), hp.matrix(), s);
    return e1 - e0;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double ga = gap(a);
  double gb = gap(b);
  while (hi - lo > 1e-8) {
    if (ga < gb) {
      hi = b;
      b = a;
      gb = ga;
      a = hi - inv_phi * (hi - lo);
      ga = gap(a);
    } else {
      lo = a;
      a = b;
      ga = gb;
      b = lo + inv_phi * (hi - lo);
      gb = gap(b);
    }
  }
  const double s_refined = 0.5 * (lo + hi);
  const double g_refined = gap(s_refined);
  if (g_refined < scan.g_min) {
    scan.g_min = g_refined;
    scan.s_at_gmin = s_refined;
  }
  return scan;
}

GapScan scan_gap(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                 const Schedule& schedule) {
  GapScan scan = find_gap_minimum(h0, hp, schedule);
  if (scan.g_min <= kGapFloor) {
    throw DegenerateGapError("spectral gap closes (g_min = " + format_double(scan.g_min) +
                             " at s = " + format_double(scan.s_at_gmin) + ")");
  }
  return scan;
}

Eigen::VectorXcd initial_state(std::size_t n) {
  if (n == 0) throw ConfigError("qubit count must be at least 1");
  if (n > kMaxDenseQubits) throw CapacityError("too many qubits for a dense state vector");
  const auto dim = Eigen::Index{1} << n;
  return Eigen::VectorXcd::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

double success_probability(const Eigen::VectorXcd& state, const Eigen::VectorXcd& psi0) {
  if (state.size() != psi0.size()) throw ShapeError("state vectors differ in length");
  return std::norm(psi0.dot(state));
}

double ground_fidelity(const Eigen::VectorXcd& state, const DenseHamiltonian& h) {
  if (static_cast<std::size_t>(state.size()) != h.dimension()) {
    throw ShapeError("state length differs from Hamiltonian dimension");
  }
  return ground_overlap(state, eigh(h.matrix(), true));
}

double spectral_norm(const Eigen::MatrixXcd& h) {
  const auto spec = eigh(h, false);
  return std::max(std::abs(spec.values[0]), std::abs(spec.values[spec.values.size() - 1]));
}

double global_time_bound(double g_min, double norm_dHds) {
  if (!(g_min > 0.0)) throw DegenerateGapError("global delay factor needs g_min > 0");
  return norm_dHds / (g_min * g_min);
}

double local_delay_integral(std::span<const double> s, std::span<const double> gaps,
                            double norm_dHds) {
  if (s.size() != gaps.size()) throw ShapeError("grid and gap trace differ in length");
  if (s.size() < 2) throw ConfigError("local delay integral needs at least 2 points");
  for (double g : gaps) {
    if (!(g > 0.0)) throw DegenerateGapError("local delay integral hit a zero gap");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double left = norm_dHds / (gaps[i - 1] * gaps[i - 1]);
    const double right = norm_dHds / (gaps[i] * gaps[i]);
    total += 0.5 * (s[i] - s[i - 1]) * (left + right);
  }
  return total;
}

LocalDelay converged_local_delay(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                                 double norm_dHds, std::size_t initial_points,
                                 std::size_t max_points) {
  auto integrate = [&](std::size_t points) {
    const auto profile = gap_profile(h0, hp, Schedule::gap_scan(points));
    return local_delay_integral(profile.s, profile.gap, norm_dHds);
  };
  LocalDelay result;
  result.grid_points = initial_points;
  result.value = integrate(initial_points);
  while (2 * (result.grid_points - 1) + 1 <= max_points) {
    const std::size_t points = 2 * (result.grid_points - 1) + 1;
    const double refined = integrate(points);
    const double change = std::abs(refined - result.value) / std::abs(refined);
    result.value = refined;
    result.grid_points = points;
    if (change < 1e-6) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::size_t default_steps(double total_time, double norm_dHds) {
  const double scaled = std::ceil(20.0 * total_time * norm_dHds);
  if (!(scaled < 1e12)) throw CapacityError("evolution would need more than 1e12 steps");
  return std::max<std::size_t>(1000, static_cast<std::size_t>(scaled));
}

EvolutionTrace evolve(const DenseHamiltonian& h0, const DenseHamiltonian& hp, double total_time,
                      std::size_t steps, const EvolveOptions& options) {
  check_pair(h0, hp);
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw DomainError("total evolution time must be positive and finite");
  }
  if (steps == 0) throw ConfigError("evolution needs at least one step");
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);

  const Eigen::MatrixXcd& a = h0.matrix();
  const Eigen::MatrixXcd& b = hp.matrix();

  EvolutionTrace trace;
  trace.total_time = total_time;
  trace.steps = steps;
  if (options.initial_state) {
    if (static_cast<std::size_t>(options.initial_state->size()) != h0.dimension()) {
      throw ShapeError("initial state length differs from Hamiltonian dimension");
    }
    trace.initial_state = *options.initial_state;
  } else {
    const auto spec0 = eigh(a, true);
    if (spec0.values[1] - spec0.values[0] <= kDegeneracyTolerance) {
      throw DegenerateGapError("ground state of the initial Hamiltonian is degenerate");
    }
    trace.initial_state = spec0.vectors.col(0);
  }
  if (std::abs(trace.initial_state.norm() - 1.0) > 1e-9) {
    throw StateError("initial state is not normalized");
  }

  Eigen::VectorXcd psi = trace.initial_state;
  auto record = [&](double s) {
    const Eigen::MatrixXcd h = (1.0 - s) * a + s * b;
    const auto spec = eigh(h, true);
    TracePoint p;
    p.s = s;
    p.e0 = spec.values[0];
    p.e1 = spec.values[1];
    p.gap = p.e1 - p.e0;
    p.norm = psi.norm();
    p.success_prob = success_probability(psi, trace.initial_state);
    p.ground_fidelity = ground_overlap(psi, spec);
    trace.points.push_back(p);
  };
  record(0.0);

  const double dt = total_time / static_cast<double>(steps);
  const double ds = 1.0 / static_cast<double>(steps);
  Eigen::VectorXcd phases(psi.size());
  const bool use_taylor = options.step_exponential == StepExponential::kTaylor;
  const bool real_operators = all_real(a) && all_real(b);
  std::optional<TaylorStepper<double>> taylor_real;
  std::optional<TaylorStepper<Complex>> taylor_complex;
  if (use_taylor && real_operators) {
    taylor_real.emplace(a.real().sparseView(), b.real().sparseView());
  } else if (use_taylor) {
    taylor_complex.emplace(a.sparseView(), b.sparseView());
  }
  for (std::size_t step = 0; step < steps; ++step) {
    const double s_mid = (static_cast<double>(step) + 0.5) * ds;
    if (taylor_real) {
      taylor_real->apply(psi, s_mid, dt);
    } else if (taylor_complex) {
      taylor_complex->apply(psi, s_mid, dt);
    } else {
      const auto spec = eigh((1.0 - s_mid) * a + s_mid * b, true);
      for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases[k] = std::polar(1.0, -spec.values[k] * dt);
      }
      const Eigen::VectorXcd coeffs = spec.vectors.adjoint() * psi;
      psi.noalias() = spec.vectors * phases.cwiseProduct(coeffs);
    }

    if (!psi.allFinite()) throw NumericalError("state vector became non-finite during evolution");
    trace.max_norm_deviation = std::max(trace.max_norm_deviation, std::abs(psi.norm() - 1.0));

    const bool last = step + 1 == steps;
    if (last || (step + 1) % stride == 0) {
      record(last ? 1.0 : static_cast<double>(step + 1) * ds);
    }
  }

  trace.final_state = psi;
  const auto lowest = std::min_element(
      trace.points.begin(), trace.points.end(),
      [](const TracePoint& x, const TracePoint& y) { return x.gap < y.gap; });
  trace.g_min = lowest->gap;
  trace.s_at_gmin = lowest->s;
  trace.candidates = readout(psi / psi.norm(), options.readout_tolerance);
  return trace;
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> points) {
  out << "s,E0,E1,gap,norm,success_prob,ground_fidelity\n";
  for (const auto& p : points) {
    out << format_double(p.s) << ',' << format_double(p.e0) << ',' << format_double(p.e1) << ','
        << format_double(p.gap) << ',' << format_double(p.norm) << ','
        << format_double(p.success_prob) << ',' << format_double(p.ground_fidelity) << '\n';
  }
}

std::vector<TracePoint> read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1);
  ++line_no;
  std::vector<TracePoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto v = parse_csv_numbers(line, 7, line_no);
    points.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return points;
}

void write_gap_csv(std::ostream& out, const GapProfile& profile) {
  out << "s,E0,E1,gap\n";
  for (std::size_t i = 0; i < profile.s.size(); ++i) {
    out << format_double(profile.s[i]) << ',' << format_double(profile.e0[i]) << ','
        << format_double(profile.e1[i]) << ',' << format_double(profile.gap[i]) << '\n';
  }
}

GapProfile read_gap_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty gap file", 1);
  ++line_no;
  GapProfile profile;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto v = parse_csv_numbers(line, 4, line_no);
    profile.s.push_back(v[0]);
    profile.e0.push_back(v[1]);
    profile.e1.push_back(v[2]);
    profile.gap.push_back(v[3]);
  }
  return profile;
}

void to_json(nlohmann::json& j, const TracePoint& p) {
  j = nlohmann::json{{"s", p.s},     {"E0", p.e0},     {"E1", p.e1},
                     {"gap", p.gap}, {"norm", p.norm}, {"success_prob", p.success_prob},
                     {"ground_fidelity", p.ground_fidelity}};
}

void from_json(const nlohmann::json& j, TracePoint& p) {
  p.s = j.at("s").get<double>();
  p.e0 = j.at("E0").get<double>();
  p.e1 = j.at("E1").get<double>();
  p.gap = j.at("gap").get<double>();
  p.norm = j.at("norm").get<double>();
  p.success_prob = j.at("success_prob").get<double>();
  p.ground_fidelity = j.at("ground_fidelity").get<double>();
}

}  // namespace qafs
