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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rashaudit/matrix.hpp"

namespace rashaudit::data {

/// A tabular binary-classification problem. Label 1 is always the minority
/// (less frequent) class; load_csv enforces that by relabeling, so every
/// downstream component can phrase itself against the minority class.
struct Dataset {
  std::string name;
  Matrix features;                        // n x p, all finite
  std::vector<int> labels;                // n entries in {0, 1}
  std::vector<std::string> column_names;  // p entries
  long long dropped_rows = 0;             // rows removed for missing values

  std::size_t n_samples() const { return features.rows; }
  std::size_t n_features() const { return features.cols; }
};

struct ImbalanceSummary {
  long long majority_count = 0;
  long long minority_count = 0;
  double ratio = 1.0;  // majority / minority, >= 1 by the relabel invariant
};

struct SplitPair {
  Dataset train;
  Dataset test;
  double fraction = 0.7;
  std::uint64_t seed = 0;
};

/// One row of the benchmark manifest: the published shape statistics a
/// bundled dataset is expected to reproduce.
struct ManifestEntry {
  std::string dataset_name;
  double expected_ratio = 0;
  long long expected_samples = 0;
  long long expected_variables = 0;
};

struct FieldCheck {
  std::string field;
  double expected = 0;
  double actual = 0;
  bool pass = false;
};

struct ManifestReport {
  std::string dataset_name;
  std::vector<FieldCheck> fields;
  bool all_pass = false;
};

/// Loads an RFC-4180-style CSV (UTF-8, header row, "." decimal separator).
///
/// The target column must hold exactly two distinct values. Rows with a
/// missing value in any column are dropped and counted in Dataset::dropped_rows.
/// String feature columns are integer-encoded by first-appearance order; the
/// minority target value maps to label 1.
Dataset load_csv(const std::string& path, const std::string& target_column);

ImbalanceSummary imbalance_ratio(const Dataset& d);

/// Deterministic stratified split: per class, round(fraction * count) rows go
/// to train (the remainder to test), chosen by a seeded shuffle. Relative row
/// order within each partition follows the input.
SplitPair stratified_split(const Dataset& d, double fraction, std::uint64_t seed);

/// Compares a loaded dataset against its manifest entry. Sample and variable
/// counts must match exactly; the imbalance ratio is compared within +-0.01.
ManifestReport check_manifest(const Dataset& d, const ManifestEntry& m);

/// Reads a JSON manifest: an array of objects with keys name,
/// imbalance_ratio, n_samples, n_variables.
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// Writes a dataset back to CSV (feature columns followed by the target
/// column holding 0/1 labels). Used by the `balance` subcommand.
void write_csv(const Dataset& d, const std::string& target_column,
               const std::string& path);

/// Row indices of each class, in input order.
std::vector<std::size_t> class_indices(const Dataset& d, int label);

}  // namespace rashaudit::data
