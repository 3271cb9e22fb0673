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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qafs/mi_engine.hpp"

namespace qafs {

using Complex = std::complex<double>;

/// Hard limit for dense 2^n x 2^n storage.
inline constexpr std::size_t kMaxDenseQubits = 14;

/// Basis-ordering convention used everywhere in the library: qubit 0 is the
/// most significant bit of a basis index, and bit value 1 (feature selected)
/// is the sigma_z eigenvalue -1.
inline bool qubit_bit(std::uint64_t basis_index, std::size_t qubit, std::size_t n) {
  return ((basis_index >> (n - 1 - qubit)) & 1U) != 0;
}

struct Coupling {
  std::size_t i;
  std::size_t j;  // always i < j
  double value;
};

/**
 * Ising form of the penalized selection objective.
 *
 * Diagonal energy of basis state x (z_i = 1 - 2 x_i):
 *
 *   E(x) = -sum_i b_i z_i - sum_{i<j} J_ij z_i z_j + offset
 *          + alpha * (sum_i x_i - k)^2
 *
 * The biases, couplings and offset carry the mutual-information part; the
 * cardinality penalty stays symbolic in (alpha, k).
 */
struct IsingProblem {
  std::size_t n = 0;
  std::vector<double> biases;
  std::vector<Coupling> couplings;
  double alpha = 0.0;
  std::size_t k = 0;
  double energy_offset = 0.0;

  void validate() const;
  /// Classical energy of one basis state.
  double energy(std::uint64_t basis_index) const;
};

/// Length-n selection mask with the derived sorted index list.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  explicit FeatureSubset(std::vector<bool> bits);
  static FeatureSubset from_basis_index(std::uint64_t index, std::size_t n);
  static FeatureSubset from_indices(const std::vector<std::size_t>& indices, std::size_t n);

  const std::vector<bool>& bits() const { return bits_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t popcount() const { return indices_.size(); }
  std::uint64_t basis_index() const;
  std::string to_string() const;  // e.g. "101"

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;

 private:
  std::vector<bool> bits_;
  std::vector<std::size_t> indices_;
};

/// Hermitian 2^n x 2^n matrix (hbar = 1) with a provenance label.
class DenseHamiltonian {
 public:
  DenseHamiltonian(std::size_t n, Eigen::MatrixXcd matrix, std::string label);

  std::size_t qubits() const { return n_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }
  bool is_diagonal() const;
  bool is_real() const;

 private:
  std::size_t n_;
  Eigen::MatrixXcd matrix_;
  std::string label_;
};

/// Dense operator for a Pauli word such as "XIZ" (character q acts on qubit q).
Eigen::MatrixXcd pauli_string(std::string_view word);

IsingProblem encode_qubo(const MIMatrix& m, double alpha, std::size_t k);

/// Diagonal of the problem Hamiltonian, one entry per basis index.
Eigen::VectorXd problem_diagonal(const IsingProblem& p);

DenseHamiltonian build_problem_hamiltonian(const IsingProblem& p);

enum class MixerSign {
  kNegative,  // -sum_i sigma_x^i: uniform superposition is the ground state
  kPositive,  // +sum_i sigma_x^i: uniform superposition is the top state
};

DenseHamiltonian build_mixer(std::size_t n, MixerSign sign = MixerSign::kNegative);

/// True iff max-norm of the commutator exceeds 1e-10.
bool check_noncommute(const DenseHamiltonian& h0, const DenseHamiltonian& hp);

/// (1 - s) h0 + s hp for s in [0, 1].
DenseHamiltonian interpolate(const DenseHamiltonian& h0, const DenseHamiltonian& hp, double s);

struct ReadoutEntry {
  FeatureSubset subset;
  std::uint64_t basis_index;
  double probability;
};

/// Basis states with |amplitude|^2 >= tolerance, most probable first; ties
/// are ordered by ascending basis index.
std::vector<ReadoutEntry> readout(const Eigen::VectorXcd& state, double tolerance);

void to_json(nlohmann::json& j, const IsingProblem& p);
void from_json(const nlohmann::json& j, IsingProblem& p);
void to_json(nlohmann::json& j, const FeatureSubset& s);

}  // namespace qafs
