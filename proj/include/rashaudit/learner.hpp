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

#include <nlohmann/json_fwd.hpp>

#include "rashaudit/dataset.hpp"
#include "rashaudit/matrix.hpp"

namespace rashaudit::learner {

enum class ModelFamily { kTree, kForest };

std::string family_name(ModelFamily f);
ModelFamily parse_family(const std::string& name);

struct Hyperparameters {
  ModelFamily family = ModelFamily::kTree;
  int max_depth = 6;
  int min_samples_leaf = 1;
  // Forest only:
  int n_trees = 50;
  double feature_fraction = 1.0;  // fraction of features tried per split
  bool bootstrap = true;
  std::uint64_t bootstrap_seed = 0;
};

/// One node of a fitted tree. Internal nodes route x[feature] < threshold to
/// `left`, otherwise to `right`; leaves store the class-1 training fraction.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_fraction = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // preorder, root at 0

  double predict_row(const double* row) const {
    int idx = 0;
    while (!nodes[idx].is_leaf()) {
      idx = row[nodes[idx].feature] < nodes[idx].threshold ? nodes[idx].left
                                                           : nodes[idx].right;
    }
    return nodes[idx].leaf_fraction;
  }
};

struct TrainedModel {
  int id = -1;
  Hyperparameters hp;
  std::vector<Tree> trees;
  double holdout_loss = 1.0;  // 1 - AUC on the pool's evaluation partition
  // Set when induction could not place a single split on mixed labels
  // (all feature vectors identical): the model is a lone prior leaf.
  bool degenerate = false;
  std::size_t n_features = 0;
};

/// Greedy CART induction with Gini impurity. Numeric splits fall at
/// midpoints between sorted distinct values; ties between candidate splits
/// resolve to the first in (feature index, threshold) order. Forests add
/// bootstrap resampling and per-split uniform feature subsampling of
/// ceil(feature_fraction * p) features, all driven by bootstrap_seed.
TrainedModel fit(const data::Dataset& train, const Hyperparameters& hp);

/// Class-1 probability per row: leaf fraction for a tree, the mean over
/// trees for a forest.
std::vector<double> predict_proba(const TrainedModel& m, const Matrix& X);

/// predict_proba with column `feature` read from `substitute` instead of X.
/// Lets permutation importance avoid copying the matrix per permutation.
std::vector<double> predict_proba_substituted(const TrainedModel& m, const Matrix& X,
                                              std::size_t feature,
                                              std::span<const double> substitute);

/// Label 1 iff predicted probability >= threshold.
std::vector<int> predict_class(const TrainedModel& m, const Matrix& X,
                               double threshold = 0.5);

/// Mann-Whitney AUC: the fraction of (positive, negative) pairs ranked
/// correctly, ties counted 1/2. Computed by rank sums in O(n log n).
double auc(std::span<const double> scores, std::span<const int> labels);

/// 1 - AUC of the model's probabilities on d. Threshold-free, in [0, 1].
double loss(const TrainedModel& m, const data::Dataset& d);

nlohmann::json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);
nlohmann::json hyperparameters_to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j);

}  // namespace rashaudit::learner
