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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rashaudit/stats.hpp"

namespace rashaudit::report {

inline constexpr const char* kMetricNames[] = {"ambiguity", "discrepancy", "viod",
                                               "set_size"};

/// One long-format experiment record.
struct ResultRow {
  std::string dataset;
  std::string method;
  double ratio = 1.0;
  std::uint64_t seed = 0;  // seed replicate index
  std::string metric;
  double value = 0.0;
  double auc_reference = 0.0;
  double auc_gain = 0.0;
};

struct ResultsTable {
  std::vector<ResultRow> rows;

  /// Lexicographic (dataset, method, ratio, seed, metric) order; the row
  /// order every writer uses.
  void sort_rows();
  bool operator==(const ResultsTable&) const = default;
};

/// Writes the table with a fixed header and 17-significant-digit reals, so
/// write-then-read restores every value exactly.
void write_results_csv(const ResultsTable& table, const std::string& path);
ResultsTable read_results_csv(const std::string& path);

struct ZoneSpec {
  std::string label;
  std::vector<std::array<double, 2>> points;
  std::vector<std::array<double, 2>> hull;  // CCW; size < 3 marks a degenerate zone
};

/// Convex hull (monotone chain, CCW, collinear points dropped).
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> points);

/// (discrepancy, ambiguity) points per method group, with hulls.
std::vector<ZoneSpec> zone_groups(const ResultsTable& table);

/// Zone plot: one hull polygon per method over (discrepancy, ambiguity),
/// axes fixed to [0,1] x [0,1]. Groups with fewer than 3 distinct
/// non-collinear points degrade to markers only.
void zone_plot(const ResultsTable& table, const std::string& out_path);

/// Statistical annotations attached to a distribution plot.
struct PairwiseTests {
  stats::TestResult omnibus;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> adjusted_p;  // empty when not computed
};

/// Box-with-points columns per group (quartile box, 1.5 IQR whiskers,
/// deterministically jittered points), the omnibus annotation, and a
/// significance bar per pair with adjusted p < 0.05.
void distribution_plot(const stats::GroupedSamples& g, const PairwiseTests& tests,
                       const std::string& title, const std::string& out_path);

/// Metric value against AUC gain, one hull zone per method. The y axis is
/// [0,1] for ambiguity/discrepancy and [-1,1] for viod; x always shows 0.
void performance_gain_plot(const ResultsTable& table, const std::string& metric,
                           const std::string& out_path);

/// Fixed y-axis range per plottable metric; UnknownMetric otherwise.
std::pair<double, double> metric_value_range(const std::string& metric);

}  // namespace rashaudit::report
