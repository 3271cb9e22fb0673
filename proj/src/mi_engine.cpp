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

#include "qafs/mi_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <unordered_map>

#include "qafs/error.hpp"

namespace qafs {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one record. Double quotes group a field; "" inside quotes is a
// literal quote.
std::vector<std::string> split_record(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

Column make_column(std::string name, std::vector<std::string> raw) {
  std::vector<double> numbers;
  numbers.reserve(raw.size());
  for (const auto& v : raw) {
    auto parsed = parse_number(v);
    if (!parsed) return Column{std::move(name), std::move(raw)};
    numbers.push_back(*parsed);
  }
  return Column{std::move(name), std::move(numbers)};
}

}  // namespace

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

Dataset::Dataset(std::vector<Column> features, Column target)
    : features_(std::move(features)), target_(std::move(target)), sample_count_(target_.size()) {
  if (sample_count_ == 0) throw DataError("dataset has no samples");
  for (const auto& column : features_) {
    if (column.size() != sample_count_) {
      throw DataError("column '" + column.name + "' has " + std::to_string(column.size()) +
                      " values, expected " + std::to_string(sample_count_));
    }
    if (column.name == target_.name) {
      throw ConfigError("target column '" + target_.name + "' also listed as a feature");
    }
  }
}

Dataset ingest_dataset(std::istream& source, const std::string& target_name,
                       const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_record(line, options.delimiter);
      break;
    }
  }
  if (header.empty()) throw ParseError("missing header row", line_no);

  const auto target_it = std::find(header.begin(), header.end(), target_name);
  if (target_it == header.end()) {
    throw ConfigError("target column '" + target_name + "' not found in header");
  }
  const auto target_index = static_cast<std::size_t>(target_it - header.begin());

  std::vector<std::vector<std::string>> raw(header.size());
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(line, options.delimiter);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) raw[c].push_back(std::move(fields[c]));
  }

  std::vector<Column> features;
  std::optional<Column> target;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto column = make_column(header[c], std::move(raw[c]));
    if (c == target_index) {
      target = std::move(column);
    } else {
      features.push_back(std::move(column));
    }
  }
  return Dataset(std::move(features), std::move(*target));
}

Dataset ingest_dataset(const std::filesystem::path& path, const std::string& target_name,
                       const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ingest_dataset(in, target_name, options);
}

Symbols discretize(std::span<const double> column, std::size_t bin_count) {
  if (bin_count == 0) throw DomainError("bin_count must be at least 1");
  if (column.empty()) throw DataError("cannot discretize an empty column");
  for (double v : column) {
    if (!std::isfinite(v)) throw DataError("non-finite value in real column");
  }
  const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  Symbols out(column.size(), 0);
  if (hi == lo) return out;
  const double width = (hi - lo) / static_cast<double>(bin_count);
  const int last = static_cast<int>(bin_count) - 1;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const int bin = static_cast<int>(std::floor((column[i] - lo) / width));
    out[i] = std::clamp(bin, 0, last);
  }
  return out;
}

Symbols encode_categorical(std::span<const std::string> column) {
  std::unordered_map<std::string, int> codes;
  Symbols out;
  out.reserve(column.size());
  for (const auto& v : column) {
    auto [it, inserted] = codes.try_emplace(v, static_cast<int>(codes.size()));
    out.push_back(it->second);
  }
  return out;
}

Symbols to_symbols(const Column& column, std::size_t bin_count) {
  if (column.is_real()) {
    return discretize(std::get<std::vector<double>>(column.values), bin_count);
  }
  return encode_categorical(std::get<std::vector<std::string>>(column.values));
}

std::vector<double> JointDistribution::marginal_a() const {
  std::vector<double> out(support_a.size(), 0.0);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    for (double p : probabilities[i]) out[i] += p;
  }
  return out;
}

std::vector<double> JointDistribution::marginal_b() const {
  std::vector<double> out(support_b.size(), 0.0);
  for (const auto& row : probabilities) {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return out;
}

JointDistribution JointDistribution::transposed() const {
  JointDistribution t{support_b, support_a, {}};
  t.probabilities.assign(support_b.size(), std::vector<double>(support_a.size(), 0.0));
  for (std::size_t i = 0; i < support_a.size(); ++i) {
    for (std::size_t j = 0; j < support_b.size(); ++j) t.probabilities[j][i] = probabilities[i][j];
  }
  return t;
}

void validate(const JointDistribution& joint) {
  if (joint.probabilities.size() != joint.support_a.size()) {
    throw ShapeError("joint table row count does not match support_a");
  }
  double total = 0.0;
  for (const auto& row : joint.probabilities) {
    if (row.size() != joint.support_b.size()) {
      throw ShapeError("joint table column count does not match support_b");
    }
    for (double p : row) {
      if (!(p >= 0.0)) throw DataError("joint probability is negative or NaN");
      total += p;
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw DataError("joint probabilities do not sum to 1");
}

JointDistribution joint_distribution(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DataError("joint_distribution: sequences differ in length");
  if (a.empty()) throw DataError("joint_distribution: empty sequences");

  std::map<int, std::size_t> index_a;
  std::map<int, std::size_t> index_b;
  for (int v : a) index_a.emplace(v, 0);
  for (int v : b) index_b.emplace(v, 0);

  JointDistribution joint;
  for (auto& [symbol, idx] : index_a) {
    idx = joint.support_a.size();
    joint.support_a.push_back(symbol);
  }
  for (auto& [symbol, idx] : index_b) {
    idx = joint.support_b.size();
    joint.support_b.push_back(symbol);
  }

  std::vector<std::vector<std::size_t>> counts(joint.support_a.size(),
                                               std::vector<std::size_t>(joint.support_b.size(), 0));
  for (std::size_t s = 0; s < a.size(); ++s) ++counts[index_a[a[s]]][index_b[b[s]]];

  const double total = static_cast<double>(a.size());
  joint.probabilities.assign(joint.support_a.size(), std::vector<double>(joint.support_b.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      joint.probabilities[i][j] = static_cast<double>(counts[i][j]) / total;
    }
  }
  return joint;
}

double mutual_information(const JointDistribution& joint) {
  validate(joint);
  const auto pa = joint.marginal_a();
  const auto pb = joint.marginal_b();
  double mi = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) {
      const double p = joint.probabilities[i][j];
      if (p > 0.0) mi += p * std::log2(p / (pa[i] * pb[j]));
    }
  }
  return mi;
}

double entropy(std::span<const int> symbols) {
  if (symbols.empty()) throw DataError("entropy of an empty sequence");
  std::map<int, std::size_t> counts;
  for (int v : symbols) ++counts[v];
  const double total = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [symbol, count] : counts) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double MIMatrix::sum() const {
  double total = 0.0;
  for (const auto& row : entries) {
    for (double v : row) total += v;
  }
  return total;
}

double MIMatrix::max_abs() const {
  double best = 0.0;
  for (const auto& row : entries) {
    for (double v : row) best = std::max(best, std::abs(v));
  }
  return best;
}

MIMatrix MIMatrix::zeros(std::size_t n) {
  return MIMatrix{n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
}

MIMatrix MIMatrix::from_rows(std::vector<std::vector<double>> rows) {
  const std::size_t n = rows.size();
  for (const auto& row : rows) {
    if (row.size() != n) throw ShapeError("MI matrix must be square");
  }
  return MIMatrix{n, std::move(rows)};
}

MIMatrix build_mi_matrix(const Dataset& data, std::size_t bin_count) {
  const std::size_t n = data.feature_count();
  if (n == 0) throw ConfigError("dataset has no feature columns");

  const Symbols target = to_symbols(data.target(), bin_count);
  std::vector<Symbols> features;
  features.reserve(n);
  for (const auto& column : data.features()) features.push_back(to_symbols(column, bin_count));

  MIMatrix m = MIMatrix::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.entries[i][i] = mutual_information(joint_distribution(features[i], target));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double mi = mutual_information(joint_distribution(features[i], features[j]));
      m.entries[i][j] = mi;
      m.entries[j][i] = mi;
    }
  }
  return m;
}

MIMatrix normalize_mi_matrix(const MIMatrix& m) {
  const double total = m.sum();
  if (!(total > 0.0)) throw DegenerateInputError("cannot normalize an MI matrix with zero sum");
  MIMatrix out = m;
  for (auto& row : out.entries) {
    for (double& v : row) v /= total;
  }
  return out;
}

std::vector<double> sample_random_weights(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = normal(rng);
  return out;
}

Dataset make_synthetic_dataset(std::uint64_t seed, std::size_t feature_count,
                               std::size_t sample_count,
                               std::optional<std::size_t> planted_feature) {
  if (feature_count == 0) throw ConfigError("synthetic dataset needs at least one feature");
  if (sample_count == 0) throw ConfigError("synthetic dataset needs at least one sample");
  if (planted_feature && *planted_feature >= feature_count) {
    throw ConfigError("planted feature index " + std::to_string(*planted_feature) +
                      " out of range");
  }
  const auto draws = sample_random_weights(seed, sample_count * (feature_count + 1));
  auto block = [&](std::size_t b) {
    const auto first = draws.begin() + static_cast<std::ptrdiff_t>(b * sample_count);
    return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(sample_count));
  };

  Column target{"y", block(0)};
  std::vector<Column> features;
  features.reserve(feature_count);
  for (std::size_t f = 0; f < feature_count; ++f) {
    Column column{"w" + std::to_string(f), block(f + 1)};
    if (planted_feature && *planted_feature == f) column.values = target.values;
    features.push_back(std::move(column));
  }
  return Dataset(std::move(features), std::move(target));
}

void to_json(nlohmann::json& j, const MIMatrix& m) {
  j = nlohmann::json{{"n", m.n}, {"entries", m.entries}};
}

void from_json(const nlohmann::json& j, MIMatrix& m) {
  auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
  m = MIMatrix::from_rows(std::move(rows));
  if (j.at("n").get<std::size_t>() != m.n) throw ShapeError("MI matrix 'n' disagrees with entries");
}

}  // namespace qafs
