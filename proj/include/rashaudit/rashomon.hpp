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

#include <nlohmann/json_fwd.hpp>

#include "rashaudit/learner.hpp"

namespace rashaudit::rashomon {

/// Search ranges for the random hyperparameter sweep that builds the model
/// pool. Integer ranges are inclusive on both ends.
struct HyperparameterSpace {
  double tree_weight = 0.5;  // forest weight is 1 - tree_weight
  int max_depth_min = 2;
  int max_depth_max = 12;
  int min_samples_leaf_min = 1;
  int min_samples_leaf_max = 20;
  int n_trees_min = 20;
  int n_trees_max = 100;
  double feature_fraction_min = 0.4;
  double feature_fraction_max = 1.0;

  void validate() const;
};

/// The searched slice of the hypothesis space: `budget` models fitted on the
/// same training partition, each scored on the same evaluation partition.
struct ModelPool {
  std::vector<learner::TrainedModel> models;  // ids 0..budget-1
  int budget = 0;
  std::uint64_t seed = 0;
  std::string eval_name;
};

struct RashomonSet {
  int reference_id = -1;
  std::vector<int> member_ids;  // ascending, always contains reference_id
  std::vector<double> member_losses;
  double epsilon = 0.05;
};

/// n independent uniform draws from the space; deterministic per seed.
std::vector<learner::Hyperparameters> sample_space(const HyperparameterSpace& space,
                                                   int n, std::uint64_t seed);

/// Fits n sampled configurations on `train` and scores each on `eval`.
/// Each model's bootstrap seed derives from (seed, model index), so the
/// parallel and serial paths produce identical pools.
ModelPool build_pool(const data::Dataset& train, const data::Dataset& eval,
                     const HyperparameterSpace& space, int n, std::uint64_t seed,
                     bool parallel = true);

/// Id of the minimum-loss model; ties break to the smallest id.
int reference_model(const ModelPool& pool);

/// All pool models with loss <= reference loss + epsilon.
RashomonSet rashomon_set(const ModelPool& pool, double epsilon);

int set_size(const RashomonSet& rs);

nlohmann::json pool_to_json(const ModelPool& pool);
ModelPool pool_from_json(const nlohmann::json& j);
void save_pool(const ModelPool& pool, const std::string& path);
ModelPool load_pool(const std::string& path);

/// Sidecar document: all pool losses plus the extracted set.
nlohmann::json rashomon_to_json(const ModelPool& pool, const RashomonSet& rs);

}  // namespace rashaudit::rashomon
