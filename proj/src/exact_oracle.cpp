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

#include "qafs/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "qafs/error.hpp"

namespace qafs {

double selection_objective(const MIMatrix& m, const FeatureSubset& x) {
  if (x.size() != m.n) throw ShapeError("selection mask length differs from matrix size");
  double total = 0.0;
  for (std::size_t i : x.indices()) {
    for (std::size_t j : x.indices()) total += m(i, j);
  }
  return total;
}

double penalized_energy(const MIMatrix& m, double alpha, std::size_t k, const FeatureSubset& x) {
  const double excess = static_cast<double>(x.popcount()) - static_cast<double>(k);
  return -selection_objective(m, x) + alpha * excess * excess;
}

double alpha_star(const MIMatrix& m) {
  return 2.0 * static_cast<double>(m.n) * m.max_abs() + 1.0;
}

OracleResult brute_force_select(const MIMatrix& m, double alpha, std::size_t k) {
  const std::size_t n = m.n;
  if (n == 0) throw ConfigError("MI matrix is empty");
  if (n > kMaxBruteForceFeatures) {
    throw CapacityError("brute force is limited to " + std::to_string(kMaxBruteForceFeatures) +
                        " features");
  }
  if (k > n) throw ConfigError("k exceeds feature count");

  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> energies(count);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t x = 0; x < count; ++x) {
    energies[x] = penalized_energy(m, alpha, k, FeatureSubset::from_basis_index(x, n));
    best = std::min(best, energies[x]);
  }

  OracleResult result;
  result.best_energy = best;
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  for (std::uint64_t x = 0; x < count; ++x) {
    if (energies[x] - best <= tol) result.optimal.push_back(FeatureSubset::from_basis_index(x, n));
  }
  result.objective_value = selection_objective(m, result.optimal.front());
  return result;
}

GroundStates exact_ground_states(const DenseHamiltonian& hp, double tol) {
  if (!hp.is_diagonal()) throw MatrixError("exact ground states need a diagonal Hamiltonian");
  const Eigen::VectorXd diag = hp.matrix().diagonal().real();
  GroundStates out;
  out.e0 = diag.minCoeff();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag[i] - out.e0 <= tol) out.indices.push_back(static_cast<std::uint64_t>(i));
  }
  return out;
}

Eigen::VectorXcd evolve_reference(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                                  double total_time, std::size_t fine_steps,
                                  const Eigen::VectorXcd& psi0) {
  if (h0.dimension() != hp.dimension()) throw ShapeError("Hamiltonians differ in dimension");
  if (static_cast<std::size_t>(psi0.size()) != h0.dimension()) {
    throw ShapeError("initial state length differs from Hamiltonian dimension");
  }
  if (!(total_time > 0.0)) throw DomainError("total evolution time must be positive");
  if (fine_steps == 0) throw ConfigError("reference evolution needs at least one step");

  const double dt = total_time / static_cast<double>(fine_steps);
  const Complex minus_i_dt(0.0, -dt);
  Eigen::VectorXcd psi = psi0;
  for (std::size_t step = 0; step < fine_steps; ++step) {
    const double s = (static_cast<double>(step) + 0.5) / static_cast<double>(fine_steps);
    const Eigen::MatrixXcd generator = minus_i_dt * ((1.0 - s) * h0.matrix() + s * hp.matrix());
    const Eigen::MatrixXcd propagator = generator.exp();
    psi = propagator * psi;
    if (!psi.allFinite()) throw NumericalError("reference state became non-finite");
  }
  return psi;
}

FeatureSubset greedy_forward_baseline(const MIMatrix& m, std::size_t k) {
  const std::size_t n = m.n;
  if (k == 0 || k > n) throw ConfigError("greedy selection needs 1 <= k <= n");
  std::vector<bool> chosen(n, false);
  for (std::size_t round = 0; round < k; ++round) {
    std::size_t best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (chosen[c]) continue;
      // Adding c contributes M_cc plus both cross terms with the chosen set.
      double gain = m(c, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (chosen[j]) gain += m(c, j) + m(j, c);
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    chosen[best] = true;
  }
  return FeatureSubset(std::move(chosen));
}

void to_json(nlohmann::json& j, const OracleResult& r) {
  nlohmann::json optimal = nlohmann::json::array();
  for (const auto& s : r.optimal) optimal.push_back(s);
  j = nlohmann::json{{"best_energy", r.best_energy},
                     {"optimal", optimal},
                     {"objective_value", r.objective_value}};
}

void from_json(const nlohmann::json& j, OracleResult& r) {
  r.best_energy = j.at("best_energy").get<double>();
  r.objective_value = j.at("objective_value").get<double>();
  r.optimal.clear();
  for (const auto& s : j.at("optimal")) {
    const auto bits = s.at("bits").get<std::string>();
    std::vector<bool> mask;
    for (char c : bits) mask.push_back(c == '1');
    r.optimal.emplace_back(std::move(mask));
  }
}

}  // namespace qafs
