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

#include "qafs/ising_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "qafs/error.hpp"

namespace qafs {

namespace {

void check_dense_capacity(std::size_t n) {
  if (n == 0) throw ConfigError("qubit count must be at least 1");
  if (n > kMaxDenseQubits) {
    throw CapacityError(std::to_string(n) + " qubits exceeds the dense limit of " +
                        std::to_string(kMaxDenseQubits));
  }
}

// Kronecker product of two diagonals (left factor is the more significant qubit).
Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

// Diagonal of the z-word that places sigma_z on every qubit in `on` and the
// identity elsewhere.
Eigen::VectorXd z_word_diagonal(std::size_t n, std::initializer_list<std::size_t> on) {
  static const Eigen::Vector2d kIdentity(1.0, 1.0);
  static const Eigen::Vector2d kPauliZ(1.0, -1.0);
  Eigen::VectorXd out = Eigen::VectorXd::Ones(1);
  for (std::size_t q = 0; q < n; ++q) {
    const bool z = std::find(on.begin(), on.end(), q) != on.end();
    out = kron(out, z ? Eigen::VectorXd(kPauliZ) : Eigen::VectorXd(kIdentity));
  }
  return out;
}

std::string format_s(double s) {
  std::ostringstream os;
  os.precision(17);
  os << "interpolated(" << s << ")";
  return os.str();
}

}  // namespace

void IsingProblem::validate() const {
  if (n == 0) throw ConfigError("Ising problem needs at least one qubit");
  if (k > n) throw ConfigError("k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  if (biases.size() != n) throw ShapeError("bias vector length differs from n");
  if (!(alpha >= 0.0)) throw ConfigError("penalty strength alpha must be non-negative");
  for (const auto& c : couplings) {
    if (!(c.i < c.j && c.j < n)) throw ShapeError("couplings must satisfy i < j < n");
  }
}

double IsingProblem::energy(std::uint64_t basis_index) const {
  auto z = [&](std::size_t q) { return qubit_bit(basis_index, q, n) ? -1.0 : 1.0; };
  double e = energy_offset;
  std::size_t selected = 0;
  for (std::size_t q = 0; q < n; ++q) {
    e -= biases[q] * z(q);
    selected += qubit_bit(basis_index, q, n) ? 1 : 0;
  }
  for (const auto& c : couplings) e -= c.value * z(c.i) * z(c.j);
  const double excess = static_cast<double>(selected) - static_cast<double>(k);
  return e + alpha * excess * excess;
}

FeatureSubset::FeatureSubset(std::vector<bool> bits) : bits_(std::move(bits)) {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) indices_.push_back(i);
  }
}

FeatureSubset FeatureSubset::from_basis_index(std::uint64_t index, std::size_t n) {
  std::vector<bool> bits(n);
  for (std::size_t q = 0; q < n; ++q) bits[q] = qubit_bit(index, q, n);
  return FeatureSubset(std::move(bits));
}

FeatureSubset FeatureSubset::from_indices(const std::vector<std::size_t>& indices, std::size_t n) {
  std::vector<bool> bits(n, false);
  for (std::size_t i : indices) {
    if (i >= n) throw DomainError("feature index out of range");
    bits[i] = true;
  }
  return FeatureSubset(std::move(bits));
}

std::uint64_t FeatureSubset::basis_index() const {
  std::uint64_t index = 0;
  for (bool b : bits_) index = (index << 1) | (b ? 1U : 0U);
  return index;
}

std::string FeatureSubset::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (bool b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

DenseHamiltonian::DenseHamiltonian(std::size_t n, Eigen::MatrixXcd matrix, std::string label)
    : n_(n), matrix_(std::move(matrix)), label_(std::move(label)) {
  check_dense_capacity(n_);
  const auto dim = Eigen::Index{1} << n_;
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw ShapeError("Hamiltonian on " + std::to_string(n_) + " qubits must be " +
                     std::to_string(dim) + "x" + std::to_string(dim));
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw MatrixError("Hamiltonian '" + label_ + "' is not Hermitian");
  }
}

bool DenseHamiltonian::is_diagonal() const {
  const Eigen::MatrixXcd off = matrix_ - Eigen::MatrixXcd(matrix_.diagonal().asDiagonal());
  return off.cwiseAbs().maxCoeff() == 0.0;
}

bool DenseHamiltonian::is_real() const { return matrix_.imag().cwiseAbs().maxCoeff() == 0.0; }

Eigen::MatrixXcd pauli_string(std::string_view word) {
  Eigen::Matrix2cd i2 = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  Eigen::Matrix2cd y;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (char c : word) {
    const Eigen::Matrix2cd* factor = nullptr;
    switch (c) {
      case 'I': factor = &i2; break;
      case 'X': factor = &x; break;
      case 'Y': factor = &y; break;
      case 'Z': factor = &z; break;
      default: throw DomainError(std::string("unknown Pauli letter '") + c + "'");
    }
    out = Eigen::kroneckerProduct(out, *factor).eval();
  }
  return out;
}

IsingProblem encode_qubo(const MIMatrix& m, double alpha, std::size_t k) {
  const std::size_t n = m.n;
  if (n == 0) throw ConfigError("MI matrix is empty");
  if (k > n) throw ConfigError("k = " + std::to_string(k) + " exceeds feature count " +
                               std::to_string(n));
  if (!(alpha >= 0.0)) throw ConfigError("penalty strength alpha must be non-negative");

  // -x^T M x as sum_i h_i x_i + sum_{i<j} q_ij x_i x_j, then x_i = (1 - z_i) / 2.
  IsingProblem p;
  p.n = n;
  p.alpha = alpha;
  p.k = k;
  p.biases.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = -m(i, i);
    p.biases[i] += h / 2.0;
    p.energy_offset += h / 2.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double q = -(m(i, j) + m(j, i));
      p.biases[i] += q / 4.0;
      p.biases[j] += q / 4.0;
      p.energy_offset += q / 4.0;
      p.couplings.push_back({i, j, -q / 4.0});
    }
  }
  return p;
}

Eigen::VectorXd problem_diagonal(const IsingProblem& p) {
  p.validate();
  check_dense_capacity(p.n);
  const auto dim = Eigen::Index{1} << p.n;

  Eigen::VectorXd diag = Eigen::VectorXd::Constant(dim, p.energy_offset);
  for (std::size_t i = 0; i < p.n; ++i) diag -= p.biases[i] * z_word_diagonal(p.n, {i});
  for (const auto& c : p.couplings) diag -= c.value * z_word_diagonal(p.n, {c.i, c.j});

  if (p.alpha != 0.0) {
    // Number operator sum_i (I - Z_i) / 2, squared elementwise since it is diagonal.
    Eigen::VectorXd count = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < p.n; ++i) {
      count += 0.5 * (Eigen::VectorXd::Ones(dim) - z_word_diagonal(p.n, {i}));
    }
    const Eigen::VectorXd excess = count.array() - static_cast<double>(p.k);
    diag += p.alpha * excess.cwiseProduct(excess);
  }
  return diag;
}

DenseHamiltonian build_problem_hamiltonian(const IsingProblem& p) {
  const Eigen::VectorXd diag = problem_diagonal(p);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(diag.size(), diag.size());
  h.diagonal() = diag.cast<Complex>();
  return DenseHamiltonian(p.n, std::move(h), "problem");
}

DenseHamiltonian build_mixer(std::size_t n, MixerSign sign) {
  check_dense_capacity(n);
  const auto dim = Eigen::Index{1} << n;
  const double coeff = sign == MixerSign::kPositive ? 1.0 : -1.0;
  // sigma_x on qubit q flips bit (n - 1 - q) of the basis index.
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    for (std::size_t q = 0; q < n; ++q) {
      const Eigen::Index row = col ^ (Eigen::Index{1} << (n - 1 - q));
      h(row, col) += coeff;
    }
  }
  return DenseHamiltonian(n, std::move(h), "mixer");
}

bool check_noncommute(const DenseHamiltonian& h0, const DenseHamiltonian& hp) {
  if (h0.dimension() != hp.dimension()) throw ShapeError("commutator of mismatched dimensions");
  const Eigen::MatrixXcd commutator = h0.matrix() * hp.matrix() - hp.matrix() * h0.matrix();
  return commutator.cwiseAbs().maxCoeff() > 1e-10;
}

DenseHamiltonian interpolate(const DenseHamiltonian& h0, const DenseHamiltonian& hp, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("schedule parameter s must lie in [0, 1]");
  if (h0.dimension() != hp.dimension()) throw ShapeError("interpolating mismatched dimensions");
  if (s == 0.0) return DenseHamiltonian(h0.qubits(), h0.matrix(), format_s(s));
  if (s == 1.0) return DenseHamiltonian(hp.qubits(), hp.matrix(), format_s(s));
  return DenseHamiltonian(h0.qubits(), (1.0 - s) * h0.matrix() + s * hp.matrix(), format_s(s));
}

std::vector<ReadoutEntry> readout(const Eigen::VectorXcd& state, double tolerance) {
  const auto dim = static_cast<std::uint64_t>(state.size());
  if (dim < 2 || (dim & (dim - 1)) != 0) throw ShapeError("state length must be a power of two");
  if (std::abs(state.norm() - 1.0) > 1e-9) throw StateError("state is not normalized");
  std::size_t n = 0;
  while ((std::uint64_t{1} << n) < dim) ++n;

  std::vector<ReadoutEntry> out;
  for (std::uint64_t i = 0; i < dim; ++i) {
    const double p = std::norm(state[static_cast<Eigen::Index>(i)]);
    if (p >= tolerance) out.push_back({FeatureSubset::from_basis_index(i, n), i, p});
  }
  std::stable_sort(out.begin(), out.end(), [](const ReadoutEntry& a, const ReadoutEntry& b) {
    return a.probability > b.probability;
  });
  return out;
}

void to_json(nlohmann::json& j, const IsingProblem& p) {
  nlohmann::json couplings = nlohmann::json::array();
  for (const auto& c : p.couplings) couplings.push_back({c.i, c.j, c.value});
  j = nlohmann::json{{"n", p.n},         {"biases", p.biases}, {"couplings", couplings},
                     {"alpha", p.alpha}, {"k", p.k},           {"offset", p.energy_offset}};
}

void from_json(const nlohmann::json& j, IsingProblem& p) {
  p.n = j.at("n").get<std::size_t>();
  p.biases = j.at("biases").get<std::vector<double>>();
  p.couplings.clear();
  for (const auto& c : j.at("couplings")) {
    p.couplings.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>(),
                           c.at(2).get<double>()});
  }
  p.alpha = j.at("alpha").get<double>();
  p.k = j.at("k").get<std::size_t>();
  p.energy_offset = j.at("offset").get<double>();
  p.validate();
}

void to_json(nlohmann::json& j, const FeatureSubset& s) {
  j = nlohmann::json{{"bits", s.to_string()}, {"indices", s.indices()}};
}

}  // namespace qafs
