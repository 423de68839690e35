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
#include <span>
#include <string>
#include <vector>

#include "rashaudit/rashomon.hpp"

namespace rashaudit::multiplicity {

/// Class predictions of every Rashomon-set member on one evaluation set.
/// Row 0 is always the reference model; remaining members follow in
/// ascending id order.
struct PredictionMatrix {
  std::size_t n_models = 0;
  std::size_t n_samples = 0;
  std::vector<std::uint8_t> entries;  // row-major {0,1}

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {entries.data() + r * n_samples, n_samples};
  }
};

struct ImportanceVector {
  std::vector<double> values;  // one mean loss increase per feature
  int repeats = 1;
  std::uint64_t seed = 0;
};

enum class ViodAggregation { kMin, kMax };

std::string aggregation_name(ViodAggregation a);
ViodAggregation parse_aggregation(const std::string& name);

/// Metrics for one experiment cell.
struct MultiplicityReport {
  std::string dataset;
  std::string method;
  double ratio = 1.0;
  std::uint64_t seed = 0;
  double ambiguity = 0.0;
  double discrepancy = 0.0;
  double viod = 1.0;
  int set_size = 1;
  double auc_reference = 0.0;
  double auc_gain = 0.0;
};

PredictionMatrix prediction_matrix(const rashomon::RashomonSet& rs,
                                   const rashomon::ModelPool& pool, const Matrix& X,
                                   double threshold = 0.5, bool parallel = true);

/// Fraction of samples where at least one competing member disagrees with
/// the reference row. Zero for a singleton matrix.
double ambiguity(const PredictionMatrix& pm);

/// Largest per-member disagreement rate with the reference row. Zero for a
/// singleton matrix.
double discrepancy(const PredictionMatrix& pm);

/// Permutation variable importance: mean increase of the model's loss when
/// one feature column is shuffled, averaged over `repeats` shuffles. The
/// shuffle for (feature j, repeat r) depends only on (seed, j, r), so every
/// model sees identical permutations.
ImportanceVector permutation_importance(const learner::TrainedModel& m,
                                        const data::Dataset& d, int repeats,
                                        std::uint64_t seed, bool parallel = true);

/// Kendall's tau-b with tie correction. Errors with AllTied when either
/// input is fully tied (the coefficient is undefined there).
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Variable importance order discrepancy: the extremal Kendall's tau between
/// the reference model's importance vector and each competing member's.
/// kMin reports the worst (most dissimilar) member, kMax the best.
/// A singleton set yields 1.
double viod(const rashomon::RashomonSet& rs, const rashomon::ModelPool& pool,
            const data::Dataset& d, int repeats, std::uint64_t seed,
            ViodAggregation aggregation = ViodAggregation::kMin, bool parallel = true);

}  // namespace rashaudit::multiplicity
