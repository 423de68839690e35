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

#include <span>
#include <string>
#include <vector>

namespace rashaudit::stats {

struct GroupedSamples {
  std::vector<std::pair<std::string, std::vector<double>>> groups;

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& [label, values] : groups) n += values.size();
    return n;
  }
};

struct BlockDesign {
  // rows = blocks, columns = treatments; must be complete.
  std::vector<std::vector<double>> cells;
};

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::string method_name;
};

enum class Adjustment { kNone, kHolm, kBonferroni };

std::string adjustment_name(Adjustment a);
Adjustment parse_adjustment(const std::string& name);

/// 1-based midranks: tied values share the average of the ranks they occupy.
std::vector<double> rank_with_ties(std::span<const double> values);

/// Kruskal-Wallis H test across independent groups, with the standard tie
/// correction; p-value from the chi-square survival function with k-1
/// degrees of freedom.
TestResult kruskal_wallis(const GroupedSamples& g);

/// Friedman test over a complete block design (within-block midranks, tie
/// corrected); p-value from chi-square with k-1 degrees of freedom where k
/// is the number of treatments (columns).
TestResult friedman(const BlockDesign& b);

/// Dunn's pairwise post-hoc z tests on the pooled ranks, two-sided, with
/// the chosen multiple-comparison adjustment. Returns the symmetric matrix
/// of adjusted p-values (unit diagonal).
std::vector<std::vector<double>> dunn_pairwise(const GroupedSamples& g,
                                               Adjustment adjustment = Adjustment::kHolm);

/// Chi-square survival function: the regularized upper incomplete gamma
/// Q(df/2, x/2), evaluated by series or continued fraction to an absolute
/// tolerance of 1e-10.
double chi_square_sf(double x, int df);

/// Standard normal survival function.
double normal_sf(double z);

}  // namespace rashaudit::stats
