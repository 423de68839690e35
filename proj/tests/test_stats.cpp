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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rashaudit/common.hpp"
#include "rashaudit/rng.hpp"
#include "rashaudit/stats.hpp"

using namespace rashaudit;
using stats::Adjustment;
using stats::BlockDesign;
using stats::GroupedSamples;

namespace {

GroupedSamples groups_of(const std::vector<std::vector<double>>& values) {
  GroupedSamples g;
  for (std::size_t i = 0; i < values.size(); ++i) {
    g.groups.emplace_back("g" + std::to_string(i), values[i]);
  }
  return g;
}

}  // namespace

TEST_CASE("rank_with_ties midranks") {
  CHECK(stats::rank_with_ties(std::vector<double>{10, 20, 30}) ==
        std::vector<double>{1, 2, 3});
  CHECK(stats::rank_with_ties(std::vector<double>{5, 5}) ==
        std::vector<double>{1.5, 1.5});
  CHECK(stats::rank_with_ties(std::vector<double>{3, 1, 3, 2}) ==
        std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("kruskal_wallis hand-computed fixture") {
  // Cross-checked against SciPy: H = 7.2, p = 0.0273237.
  const auto result = stats::kruskal_wallis(groups_of({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}));
  CHECK(result.statistic == doctest::Approx(7.2).epsilon(1e-12));
  CHECK(result.df == 2);
  CHECK(result.p_value == doctest::Approx(0.0273237).epsilon(1e-4));
}

TEST_CASE("kruskal_wallis boundary and degenerate behavior") {
  const auto same = stats::kruskal_wallis(groups_of({{1, 2}, {1, 2}}));
  CHECK(same.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same.p_value == doctest::Approx(1.0));

  try {
    (void)stats::kruskal_wallis(groups_of({{3, 3}, {3, 3}}));
    FAIL("expected DegenerateGroups");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateGroups);
  }
}

TEST_CASE("kruskal_wallis is invariant under strictly increasing transforms") {
  Rng rng(41);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::vector<double>> raw(2 + rng.next_below(3));
    for (auto& group : raw) {
      group.resize(3 + rng.next_below(8));
      for (auto& v : group) v = static_cast<double>(rng.next_below(12));
    }
    // Guard against the all-identical degenerate case.
    raw[0][0] = 100;
    raw[1][0] = -100;

    auto transformed = raw;
    for (auto& group : transformed) {
      for (auto& v : group) v = std::exp(v / 4.0) + 3.0;
    }
    const auto a = stats::kruskal_wallis(groups_of(raw));
    const auto b = stats::kruskal_wallis(groups_of(transformed));
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
    CHECK(a.p_value >= 0.0);
    CHECK(a.p_value <= 1.0);
  }
}

TEST_CASE("friedman hand-computed fixture") {
  // Every block ranks the treatments identically: chi2 = 6, p = 0.0497871
  // (cross-checked against SciPy).
  BlockDesign design;
  design.cells = {{1, 2, 3}, {10, 20, 30}, {5, 6, 7}};
  const auto result = stats::friedman(design);
  CHECK(result.statistic == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(result.df == 2);
  CHECK(result.p_value == doctest::Approx(0.0497871).epsilon(1e-4));
}

TEST_CASE("friedman fully tied blocks and df bookkeeping") {
  BlockDesign tied;
  tied.cells = {{4, 4, 4}, {7, 7, 7}};
  const auto result = stats::friedman(tied);
  CHECK(result.statistic == 0.0);
  CHECK(result.p_value == 1.0);

  // Six treatments (the paper's ratio grid size) report df 5.
  BlockDesign six;
  six.cells = {{1, 2, 3, 4, 5, 6}, {2, 3, 1, 6, 4, 5}, {3, 1, 2, 5, 6, 4}};
  CHECK(stats::friedman(six).df == 5);

  BlockDesign ragged;
  ragged.cells = {{1, 2, 3}, {1, 2}};
  try {
    (void)stats::friedman(ragged);
    FAIL("expected IncompleteDesign");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIncompleteDesign);
  }
}

TEST_CASE("friedman is invariant under within-block monotone transforms") {
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    BlockDesign design;
    design.cells.resize(3 + rng.next_below(4));
    for (auto& row : design.cells) {
      row.resize(4);
      for (auto& v : row) v = static_cast<double>(rng.next_below(10));
    }
    auto transformed = design;
    for (std::size_t b = 0; b < transformed.cells.size(); ++b) {
      const double scale = 1.0 + static_cast<double>(b);
      for (auto& v : transformed.cells[b]) v = scale * v * v * v + v;
    }
    // Cubing is monotone only for non-negative values, which next_below
    // guarantees here.
    const auto a = stats::friedman(design);
    const auto b = stats::friedman(transformed);
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
  }
}

TEST_CASE("dunn_pairwise fixture and adjustments") {
  const auto g = groups_of({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});

  const auto raw = stats::dunn_pairwise(g, Adjustment::kNone);
  // z for groups 0 vs 2 is -6/sqrt(5); two-sided p ~ 0.0072904
  // (cross-checked against SciPy's normal survival function).
  CHECK(raw[0][2] == doctest::Approx(0.0072904).epsilon(1e-4));
  CHECK(raw[0][2] < 0.05);

  // Symmetric with unit diagonal.
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(raw[i][i] == 1.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(raw[i][j] == raw[j][i]);
  }

  const auto bonf = stats::dunn_pairwise(g, Adjustment::kBonferroni);
  const auto holm = stats::dunn_pairwise(g, Adjustment::kHolm);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(bonf[i][j] == doctest::Approx(std::min(1.0, raw[i][j] * 3.0)));
      CHECK(holm[i][j] >= raw[i][j]);
      CHECK(holm[i][j] <= bonf[i][j] + 1e-15);
    }
  }
}

TEST_CASE("dunn_pairwise identical groups and degenerate input") {
  const auto same = stats::dunn_pairwise(groups_of({{1, 2, 3}, {1, 2, 3}}),
                                         Adjustment::kNone);
  CHECK(same[0][1] == doctest::Approx(1.0));

  try {
    (void)stats::dunn_pairwise(groups_of({{2, 2}, {2, 2}}), Adjustment::kNone);
    FAIL("expected DegenerateGroups");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateGroups);
  }
}

TEST_CASE("chi_square_sf values and properties") {
  CHECK(stats::chi_square_sf(0.0, 3) == 1.0);

  // df = 2 has the closed form exp(-x/2).
  for (double x : {0.1, 0.5, 1.0, 2.0, 3.6, 6.0, 7.2, 15.0, 40.0}) {
    CHECK(std::abs(stats::chi_square_sf(x, 2) - std::exp(-x / 2.0)) <= 1e-10);
  }

  // The Friedman figure from the ratio-block comparison.
  CHECK(stats::chi_square_sf(6.8286, 5) == doctest::Approx(0.2337).epsilon(5e-4));

  // Monotone decreasing in x for several dfs.
  for (int df : {1, 2, 5, 10}) {
    double prev = 1.0;
    for (double x = 0.0; x <= 30.0; x += 0.25) {
      const double p = stats::chi_square_sf(x, df);
      CHECK(p <= prev + 1e-15);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      prev = p;
    }
  }

  CHECK_THROWS_AS((void)stats::chi_square_sf(-1.0, 2), Error);
  CHECK_THROWS_AS((void)stats::chi_square_sf(1.0, 0), Error);
}

TEST_CASE("normal_sf sanity") {
  CHECK(stats::normal_sf(0.0) == doctest::Approx(0.5));
  CHECK(stats::normal_sf(1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(stats::normal_sf(-1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
}
