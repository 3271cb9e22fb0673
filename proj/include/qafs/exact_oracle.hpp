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
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qafs/ising_encoder.hpp"
#include "qafs/mi_engine.hpp"

// Exhaustive solvers used to certify the encoder and the simulator on small
// instances. Nothing here shares code with the Ising encoding or the
// eigendecomposition propagator.
namespace qafs {

inline constexpr std::size_t kMaxBruteForceFeatures = 20;

struct OracleResult {
  double best_energy = 0.0;
  /// Every global minimizer, ascending basis index.
  std::vector<FeatureSubset> optimal;
  /// Un-penalized x^T M x of the first minimizer.
  double objective_value = 0.0;
};

/// x^T M x for a selection mask.
double selection_objective(const MIMatrix& m, const FeatureSubset& x);

/// -x^T M x + alpha (|x| - k)^2.
double penalized_energy(const MIMatrix& m, double alpha, std::size_t k, const FeatureSubset& x);

/// Penalty strength 2 n max|M_ij| + 1, large enough that every optimum has
/// exactly k features.
double alpha_star(const MIMatrix& m);

OracleResult brute_force_select(const MIMatrix& m, double alpha, std::size_t k);

struct GroundStates {
  double e0 = 0.0;
  std::vector<std::uint64_t> indices;  // ascending
};

/// Minimum diagonal entry and every index within `tol` of it. The input must
/// be diagonal.
GroundStates exact_ground_states(const DenseHamiltonian& hp, double tol);

/// Fine-step midpoint propagation using a Pade matrix exponential for each
/// step. Test-only reference for `evolve`.
Eigen::VectorXcd evolve_reference(const DenseHamiltonian& h0, const DenseHamiltonian& hp,
                                  double total_time, std::size_t fine_steps,
                                  const Eigen::VectorXcd& psi0);

/// Forward selection: repeatedly add the feature with the largest marginal
/// gain in x^T M x; ties go to the lowest index.
FeatureSubset greedy_forward_baseline(const MIMatrix& m, std::size_t k);

void to_json(nlohmann::json& j, const OracleResult& r);
void from_json(const nlohmann::json& j, OracleResult& r);

}  // namespace qafs
