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

#include "rashaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rashaudit/common.hpp"

namespace rashaudit::stats {

std::string adjustment_name(Adjustment a) {
  switch (a) {
    case Adjustment::kNone: return "none";
    case Adjustment::kHolm: return "holm";
    case Adjustment::kBonferroni: return "bonferroni";
  }
  return "unknown";
}

Adjustment parse_adjustment(const std::string& name) {
  if (name == "none") return Adjustment::kNone;
  if (name == "holm") return Adjustment::kHolm;
  if (name == "bonferroni") return Adjustment::kBonferroni;
  fail(ErrorCode::kInvalidArgument, "unknown adjustment \"" + name + "\"");
}

std::vector<double> rank_with_ties(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "rank_with_ties: empty input");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Sum of t^3 - t over tie groups of a ranked sample.
double tie_term(std::span<const double> sorted_values) {
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted_values.size()) {
    std::size_t j = i;
    while (j + 1 < sorted_values.size() && sorted_values[j + 1] == sorted_values[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

void validate_groups(const GroupedSamples& g) {
  if (g.groups.size() < 2) {
    fail(ErrorCode::kInvalidArgument, "need at least 2 groups");
  }
  for (const auto& [label, values] : g.groups) {
    if (values.empty()) {
      fail(ErrorCode::kInvalidArgument, "group \"" + label + "\" is empty");
    }
  }
  if (g.total_size() < 3) fail(ErrorCode::kInvalidArgument, "need at least 3 values");
}

struct PooledRanks {
  std::vector<double> all_values;   // concatenated, group by group
  std::vector<double> ranks;        // aligned with all_values
  std::vector<double> sorted;       // all_values sorted
  std::vector<std::size_t> sizes;   // per group
  std::vector<double> rank_means;   // per group
};

PooledRanks pool_and_rank(const GroupedSamples& g) {
  PooledRanks pr;
  for (const auto& [label, values] : g.groups) {
    pr.sizes.push_back(values.size());
    pr.all_values.insert(pr.all_values.end(), values.begin(), values.end());
  }
  pr.ranks = rank_with_ties(pr.all_values);
  pr.sorted = pr.all_values;
  std::sort(pr.sorted.begin(), pr.sorted.end());

  std::size_t offset = 0;
  for (std::size_t size : pr.sizes) {
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) sum += pr.ranks[offset + i];
    pr.rank_means.push_back(sum / static_cast<double>(size));
    offset += size;
  }
  return pr;
}

}  // namespace

TestResult kruskal_wallis(const GroupedSamples& g) {
  validate_groups(g);
  const auto pr = pool_and_rank(g);
  const double N = static_cast<double>(pr.all_values.size());

  const double ties = tie_term(pr.sorted);
  const double correction = 1.0 - ties / (N * N * N - N);
  if (correction == 0.0) {
    fail(ErrorCode::kDegenerateGroups, "all values identical");
  }

  double h = 0.0;
  for (std::size_t j = 0; j < pr.sizes.size(); ++j) {
    const double nj = static_cast<double>(pr.sizes[j]);
    const double centered = pr.rank_means[j] - (N + 1.0) / 2.0;
    h += nj * centered * centered;
  }
  h *= 12.0 / (N * (N + 1.0));
  h /= correction;

  TestResult result;
  result.method_name = "kruskal_wallis";
  result.statistic = h;
  result.df = static_cast<int>(g.groups.size()) - 1;
  result.p_value = chi_square_sf(h, result.df);
  return result;
}

TestResult friedman(const BlockDesign& b) {
  const std::size_t n_blocks = b.cells.size();
  if (n_blocks < 2) fail(ErrorCode::kIncompleteDesign, "need at least 2 blocks");
  const std::size_t k = b.cells.front().size();
  if (k < 2) fail(ErrorCode::kIncompleteDesign, "need at least 2 treatments");
  for (const auto& row : b.cells) {
    if (row.size() != k) fail(ErrorCode::kIncompleteDesign, "ragged block design");
    for (double v : row) {
      if (!std::isfinite(v)) fail(ErrorCode::kIncompleteDesign, "non-finite cell");
    }
  }

  std::vector<double> rank_sums(k, 0.0);
  double ties = 0.0;
  for (const auto& row : b.cells) {
    const auto ranks = rank_with_ties(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    auto sorted = row;
    std::sort(sorted.begin(), sorted.end());
    ties += tie_term(sorted);
  }

  const double n = static_cast<double>(n_blocks);
  const double kk = static_cast<double>(k);
  double ssbn = 0.0;
  for (double r : rank_sums) ssbn += r * r;

  const double correction = 1.0 - ties / (n * (kk * kk * kk - kk));
  TestResult result;
  result.method_name = "friedman";
  result.df = static_cast<int>(k) - 1;
  if (correction == 0.0) {
    // Every block fully tied: no evidence of any treatment effect.
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  const double raw = 12.0 / (n * kk * (kk + 1.0)) * ssbn - 3.0 * n * (kk + 1.0);
  result.statistic = raw / correction;
  // Fully tied blocks can drive the corrected statistic a hair below zero.
  if (result.statistic < 0.0 && result.statistic > -1e-12) result.statistic = 0.0;
  result.p_value = chi_square_sf(result.statistic, result.df);
  return result;
}

std::vector<std::vector<double>> dunn_pairwise(const GroupedSamples& g,
                                               Adjustment adjustment) {
  validate_groups(g);
  const auto pr = pool_and_rank(g);
  const double N = static_cast<double>(pr.all_values.size());
  const std::size_t k = pr.sizes.size();

  const double ties = tie_term(pr.sorted);
  const double variance_base = N * (N + 1.0) / 12.0 - ties / (12.0 * (N - 1.0));
  if (variance_base <= 0.0) {
    fail(ErrorCode::kDegenerateGroups, "all values identical");
  }

  struct Pair {
    std::size_t i, j;
    double p;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double se = std::sqrt(
          variance_base * (1.0 / static_cast<double>(pr.sizes[i]) +
                           1.0 / static_cast<double>(pr.sizes[j])));
      const double z = (pr.rank_means[i] - pr.rank_means[j]) / se;
      const double p = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
      pairs.push_back({i, j, p});
    }
  }

  const auto m = static_cast<double>(pairs.size());
  switch (adjustment) {
    case Adjustment::kNone:
      break;
    case Adjustment::kBonferroni:
      for (auto& pair : pairs) pair.p = std::min(1.0, pair.p * m);
      break;
    case Adjustment::kHolm: {
      std::vector<std::size_t> order(pairs.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pairs[a].p != pairs[b].p) return pairs[a].p < pairs[b].p;
        return a < b;
      });
      double running = 0.0;
      for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const double scaled =
            std::min(1.0, pairs[order[rank]].p * (m - static_cast<double>(rank)));
        running = std::max(running, scaled);
        pairs[order[rank]].p = running;
      }
      break;
    }
  }

  std::vector<std::vector<double>> matrix(k, std::vector<double>(k, 1.0));
  for (const auto& pair : pairs) {
    matrix[pair.i][pair.j] = pair.p;
    matrix[pair.j][pair.i] = pair.p;
  }
  return matrix;
}

namespace {

// Regularized incomplete gamma functions via the series / continued-fraction
// split, following the classic treatment in Numerical Recipes.
constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double upper_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df < 1) fail(ErrorCode::kInvalidArgument, "df must be >= 1");
  if (x < 0.0) fail(ErrorCode::kInvalidArgument, "x must be >= 0");
  if (x == 0.0) return 1.0;
  const double a = 0.5 * static_cast<double>(df);
  const double half_x = 0.5 * x;
  if (half_x < a + 1.0) return 1.0 - lower_series(a, half_x);
  return upper_continued_fraction(a, half_x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace rashaudit::stats
