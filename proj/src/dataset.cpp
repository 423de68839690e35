/*
 * Copyright 2025 The rashaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rashaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rashaudit/common.hpp"
#include "rashaudit/csv.hpp"
#include "rashaudit/rng.hpp"

namespace rashaudit::data {

namespace {

bool is_missing(const std::string& field) {
  if (field.empty() || field == "NA" || field == "N/A" || field == "?") return true;
  // Literal non-finite numerics ("nan", "inf", ...) count as missing so the
  // loaded matrix never holds them.
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  return end == begin + field.size() && !std::isfinite(value);
}

// Full-string numeric parse; non-finite values count as not numeric so the
// loaded matrix never contains inf or NaN.
bool parse_number(const std::string& field, double* out) {
  if (field.empty()) return false;
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + field.size()) return false;
  if (!std::isfinite(value)) return false;
  *out = value;
  return true;
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
  const auto records = csv::parse_file(path);

  if (records.empty()) fail(ErrorCode::kMalformedCsv, path + ": no header row");
  const auto& header = records.front();
  const std::size_t width = header.size();

  std::size_t target_idx = width;
  for (std::size_t j = 0; j < width; ++j) {
    if (header[j] == target_column) {
      target_idx = j;
      break;
    }
  }
  if (target_idx == width) {
    fail(ErrorCode::kInvalidArgument,
         path + ": target column \"" + target_column + "\" not found");
  }
  if (width < 2) {
    fail(ErrorCode::kInvalidArgument, path + ": no feature columns");
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      fail(ErrorCode::kMalformedCsv,
           path + ": row " + std::to_string(r + 1) + " has " +
               std::to_string(records[r].size()) + " fields, expected " +
               std::to_string(width));
    }
  }

  // Drop rows with missing values before any type decision.
  std::vector<const std::vector<std::string>*> kept;
  long long dropped = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    bool missing = false;
    for (const auto& f : records[r]) {
      if (is_missing(f)) {
        missing = true;
        break;
      }
    }
    if (missing)
      ++dropped;
    else
      kept.push_back(&records[r]);
  }
  if (kept.empty()) fail(ErrorCode::kEmptyAfterCleaning, path);

  const std::size_t n = kept.size();
  const std::size_t p = width - 1;

  // A feature column is numeric only if every kept value parses as a finite
  // number; otherwise it is integer-encoded by first-appearance order.
  std::vector<bool> numeric(width, true);
  double scratch = 0;
  for (std::size_t j = 0; j < width; ++j) {
    if (j == target_idx) continue;
    for (const auto* row : kept) {
      if (!parse_number((*row)[j], &scratch)) {
        numeric[j] = false;
        break;
      }
    }
  }

  Dataset d;
  d.name = stem_of(path);
  d.dropped_rows = dropped;
  d.features = Matrix(n, p);
  d.labels.resize(n);
  d.column_names.reserve(p);
  for (std::size_t j = 0; j < width; ++j) {
    if (j != target_idx) d.column_names.push_back(header[j]);
  }

  for (std::size_t j = 0, out_j = 0; j < width; ++j) {
    if (j == target_idx) continue;
    if (numeric[j]) {
      for (std::size_t i = 0; i < n; ++i) {
        parse_number((*kept[i])[j], &d.features(i, out_j));
      }
    } else {
      std::unordered_map<std::string, double> codes;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& value = (*kept[i])[j];
        auto [it, inserted] = codes.emplace(value, static_cast<double>(codes.size()));
        d.features(i, out_j) = it->second;
      }
    }
    ++out_j;
  }

  // Target: exactly two distinct values, minority mapped to 1. On equal
  // counts the value seen second maps to 1.
  std::vector<std::string> distinct;
  std::vector<long long> counts;
  std::vector<std::size_t> which(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& value = (*kept[i])[target_idx];
    std::size_t k = 0;
    while (k < distinct.size() && distinct[k] != value) ++k;
    if (k == distinct.size()) {
      distinct.push_back(value);
      counts.push_back(0);
    }
    if (distinct.size() > 2) {
      fail(ErrorCode::kNotBinaryTarget,
           path + ": target column has more than 2 distinct values");
    }
    which[i] = k;
    ++counts[k];
  }
  if (distinct.size() < 2) {
    fail(ErrorCode::kNotBinaryTarget,
         path + ": target column has a single distinct value");
  }
  const std::size_t minority = counts[1] <= counts[0] ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) d.labels[i] = which[i] == minority ? 1 : 0;

  return d;
}

ImbalanceSummary imbalance_ratio(const Dataset& d) {
  ImbalanceSummary s;
  for (int label : d.labels) {
    if (label == 1)
      ++s.minority_count;
    else
      ++s.majority_count;
  }
  s.ratio = static_cast<double>(s.majority_count) / static_cast<double>(s.minority_count);
  return s;
}

std::vector<std::size_t> class_indices(const Dataset& d, int label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (d.labels[i] == label) idx.push_back(i);
  }
  return idx;
}

namespace {

Dataset subset_dataset(const Dataset& d, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.name = d.name;
  out.column_names = d.column_names;
  out.features = d.features.take_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(d.labels[r]);
  return out;
}

}  // namespace

SplitPair stratified_split(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.5 && fraction < 0.95)) {
    fail(ErrorCode::kInvalidArgument,
         "split fraction must lie in (0.5, 0.95), got " + std::to_string(fraction));
  }

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (int label : {0, 1}) {
    auto idx = class_indices(d, label);
    if (idx.size() < 2) {
      fail(ErrorCode::kClassTooSmall,
           "class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
               " samples; need at least 2");
    }
    const auto count = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    if (count == 0 || count >= idx.size()) {
      fail(ErrorCode::kClassTooSmall,
           "class " + std::to_string(label) + " would be absent from a partition");
    }
    Rng rng(seed_combine(seed_combine(seed, "stratified_split"),
                         static_cast<std::uint64_t>(label)));
    rng.shuffle(idx);
    train_rows.insert(train_rows.end(), idx.begin(), idx.begin() + count);
    test_rows.insert(test_rows.end(), idx.begin() + count, idx.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  SplitPair pair;
  pair.fraction = fraction;
  pair.seed = seed;
  pair.train = subset_dataset(d, train_rows);
  pair.test = subset_dataset(d, test_rows);
  return pair;
}

ManifestReport check_manifest(const Dataset& d, const ManifestEntry& m) {
  if (d.name != m.dataset_name) {
    fail(ErrorCode::kNameMismatch,
         "dataset \"" + d.name + "\" vs manifest \"" + m.dataset_name + "\"");
  }
  ManifestReport report;
  report.dataset_name = d.name;

  const auto summary = imbalance_ratio(d);
  const auto n = static_cast<double>(d.n_samples());
  const auto p = static_cast<double>(d.n_features());

  report.fields.push_back({"n_samples", static_cast<double>(m.expected_samples), n,
                           n == static_cast<double>(m.expected_samples)});
  report.fields.push_back({"n_variables", static_cast<double>(m.expected_variables),
                           p, p == static_cast<double>(m.expected_variables)});
  report.fields.push_back({"imbalance_ratio", m.expected_ratio, summary.ratio,
                           std::abs(summary.ratio - m.expected_ratio) <= 0.01});

  report.all_pass = true;
  for (const auto& f : report.fields) report.all_pass = report.all_pass && f.pass;
  return report;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformedCsv, path + ": " + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kSchemaViolation, path + ": manifest must be an array");
  std::vector<ManifestEntry> entries;
  for (const auto& item : j) {
    ManifestEntry e;
    try {
      e.dataset_name = item.at("name").get<std::string>();
      e.expected_ratio = item.at("imbalance_ratio").get<double>();
      e.expected_samples = item.at("n_samples").get<long long>();
      e.expected_variables = item.at("n_variables").get<long long>();
    } catch (const nlohmann::json::exception& e2) {
      fail(ErrorCode::kSchemaViolation, path + ": " + e2.what());
    }
    if (e.expected_ratio <= 0 || e.expected_samples <= 0 || e.expected_variables <= 0) {
      fail(ErrorCode::kSchemaViolation,
           path + ": non-positive expectation for " + e.dataset_name);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_csv(const Dataset& d, const std::string& target_column,
               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  for (std::size_t j = 0; j < d.column_names.size(); ++j) {
    out << d.column_names[j] << ',';
  }
  out << target_column << '\n';
  char buf[64];
  for (std::size_t i = 0; i < d.n_samples(); ++i) {
    for (std::size_t j = 0; j < d.n_features(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.features(i, j));
      out << buf << ',';
    }
    out << d.labels[i] << '\n';
  }
  if (!out) fail(ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace rashaudit::data
