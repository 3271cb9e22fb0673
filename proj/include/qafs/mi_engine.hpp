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
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qafs {

/// Discrete symbol sequence. Codes are dense non-negative integers.
using Symbols = std::vector<int>;

inline constexpr std::size_t kDefaultBinCount = 10;

/// A named column of either real values or raw categorical strings.
struct Column {
  std::string name;
  std::variant<std::vector<double>, std::vector<std::string>> values;

  bool is_real() const { return std::holds_alternative<std::vector<double>>(values); }
  std::size_t size() const;
};

/**
 * Tabular samples: feature columns plus one target column.
 *
 * All columns share the same length and the target column is kept apart
 * from the features. Construction validates both invariants.
 */
class Dataset {
 public:
  Dataset(std::vector<Column> features, Column target);

  const std::vector<Column>& features() const { return features_; }
  const Column& target() const { return target_; }
  std::size_t feature_count() const { return features_.size(); }
  std::size_t sample_count() const { return sample_count_; }

 private:
  std::vector<Column> features_;
  Column target_;
  std::size_t sample_count_;
};

struct CsvOptions {
  char delimiter = ',';
};

/// Parses delimited text with a mandatory header row. A column is typed real
/// when every one of its values parses as a number.
Dataset ingest_dataset(std::istream& source, const std::string& target_name,
                       const CsvOptions& options = {});
Dataset ingest_dataset(const std::filesystem::path& path, const std::string& target_name,
                       const CsvOptions& options = {});

/// Equal-width binning over [min, max]; the maximum lands in the last bin and
/// a constant column maps to bin 0.
Symbols discretize(std::span<const double> column, std::size_t bin_count);

/// Maps categorical strings to codes in order of first appearance.
Symbols encode_categorical(std::span<const std::string> column);

/// Discretizes real columns, encodes categorical ones.
Symbols to_symbols(const Column& column, std::size_t bin_count);

/// Empirical joint probability table of two symbol sequences.
struct JointDistribution {
  std::vector<int> support_a;  // sorted distinct symbols of a
  std::vector<int> support_b;  // sorted distinct symbols of b
  std::vector<std::vector<double>> probabilities;  // |A| x |B|

  std::vector<double> marginal_a() const;
  std::vector<double> marginal_b() const;
  JointDistribution transposed() const;
};

/// Validates the table (non-negative, rectangular, sums to one within 1e-12).
void validate(const JointDistribution& joint);

JointDistribution joint_distribution(std::span<const int> a, std::span<const int> b);

/// Plug-in mutual information in bits; 0 log 0 terms contribute nothing.
double mutual_information(const JointDistribution& joint);

/// Shannon entropy (bits) of an empirical symbol sequence.
double entropy(std::span<const int> symbols);

/// Symmetric matrix of MI scores: relevance on the diagonal, pairwise
/// redundancy off it.
struct MIMatrix {
  std::size_t n = 0;
  std::vector<std::vector<double>> entries;

  double operator()(std::size_t i, std::size_t j) const { return entries[i][j]; }
  double sum() const;
  double max_abs() const;

  static MIMatrix zeros(std::size_t n);
  static MIMatrix from_rows(std::vector<std::vector<double>> rows);
};

MIMatrix build_mi_matrix(const Dataset& data, std::size_t bin_count = kDefaultBinCount);

/// Scales entries so the matrix sums to one. Throws DegenerateInputError when
/// every entry is zero.
MIMatrix normalize_mi_matrix(const MIMatrix& m);

/// Deterministic standard-normal samples for a fixed seed.
std::vector<double> sample_random_weights(std::uint64_t seed, std::size_t n);

/**
 * Synthetic dataset: every feature column and the target are independent
 * seeded standard-normal draws. When `planted_feature` is set, that feature column is replaced by a
 * copy of the target column.
 */
Dataset make_synthetic_dataset(std::uint64_t seed, std::size_t feature_count,
                               std::size_t sample_count,
                               std::optional<std::size_t> planted_feature = std::nullopt);

void to_json(nlohmann::json& j, const MIMatrix& m);
void from_json(const nlohmann::json& j, MIMatrix& m);

}  // namespace qafs
