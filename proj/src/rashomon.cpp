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

#include "rashaudit/rashomon.hpp"

#include <exception>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rashaudit/common.hpp"
#include "rashaudit/rng.hpp"

namespace rashaudit::rashomon {

void HyperparameterSpace::validate() const {
  const bool ok = tree_weight >= 0.0 && tree_weight <= 1.0 &&
                  max_depth_min >= 1 && max_depth_min <= max_depth_max &&
                  min_samples_leaf_min >= 1 &&
                  min_samples_leaf_min <= min_samples_leaf_max &&
                  n_trees_min >= 1 && n_trees_min <= n_trees_max &&
                  feature_fraction_min > 0.0 &&
                  feature_fraction_min <= feature_fraction_max &&
                  feature_fraction_max <= 1.0;
  if (!ok) fail(ErrorCode::kEmptySpace, "hyperparameter space has an empty range");
}

std::vector<learner::Hyperparameters> sample_space(const HyperparameterSpace& space,
                                                   int n, std::uint64_t seed) {
  space.validate();
  if (n < 1) fail(ErrorCode::kInvalidArgument, "sample_space: n must be >= 1");

  Rng rng(seed_combine(seed, "sample_space"));
  std::vector<learner::Hyperparameters> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    learner::Hyperparameters hp;
    // Every field is drawn regardless of family so the stream position, and
    // with it every later draw, does not depend on earlier outcomes.
    const double family_draw = rng.next_unit();
    hp.max_depth = static_cast<int>(rng.next_int(space.max_depth_min, space.max_depth_max));
    hp.min_samples_leaf = static_cast<int>(
        rng.next_int(space.min_samples_leaf_min, space.min_samples_leaf_max));
    hp.n_trees = static_cast<int>(rng.next_int(space.n_trees_min, space.n_trees_max));
    hp.feature_fraction =
        rng.next_real(space.feature_fraction_min, space.feature_fraction_max);
    hp.bootstrap_seed = rng.next_u64();
    hp.bootstrap = true;
    hp.family = family_draw < space.tree_weight ? learner::ModelFamily::kTree
                                                : learner::ModelFamily::kForest;
    out.push_back(hp);
  }
  return out;
}

ModelPool build_pool(const data::Dataset& train, const data::Dataset& eval,
                     const HyperparameterSpace& space, int n, std::uint64_t seed,
                     bool parallel) {
  if (train.n_features() != eval.n_features()) {
    fail(ErrorCode::kDimensionMismatch, "train and eval feature counts differ");
  }
  auto configs = sample_space(space, n, seed);
  for (int i = 0; i < n; ++i) {
    configs[static_cast<std::size_t>(i)].bootstrap_seed =
        seed_combine(seed_combine(seed, "model"), static_cast<std::uint64_t>(i));
  }

  ModelPool pool;
  pool.budget = n;
  pool.seed = seed;
  pool.eval_name = eval.name;
  pool.models.resize(static_cast<std::size_t>(n));

  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    try {
      auto model = learner::fit(train, configs[static_cast<std::size_t>(i)]);
      model.id = i;
      model.holdout_loss = learner::loss(model, eval);
      pool.models[static_cast<std::size_t>(i)] = std::move(model);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return pool;
}

int reference_model(const ModelPool& pool) {
  if (pool.models.empty()) fail(ErrorCode::kEmptyPool, "pool has no models");
  int best = 0;
  for (std::size_t i = 1; i < pool.models.size(); ++i) {
    if (pool.models[i].holdout_loss < pool.models[static_cast<std::size_t>(best)].holdout_loss) {
      best = static_cast<int>(i);
    }
  }
  return pool.models[static_cast<std::size_t>(best)].id;
}

RashomonSet rashomon_set(const ModelPool& pool, double epsilon) {
  if (pool.models.empty()) fail(ErrorCode::kEmptyPool, "pool has no models");
  if (!(epsilon > 0.0)) fail(ErrorCode::kInvalidArgument, "epsilon must be > 0");

  RashomonSet rs;
  rs.epsilon = epsilon;
  rs.reference_id = reference_model(pool);

  double reference_loss = 0.0;
  for (const auto& m : pool.models) {
    if (m.id == rs.reference_id) reference_loss = m.holdout_loss;
  }
  const double bound = reference_loss + epsilon;
  for (const auto& m : pool.models) {
    if (m.holdout_loss <= bound) {
      rs.member_ids.push_back(m.id);
      rs.member_losses.push_back(m.holdout_loss);
    }
  }
  return rs;
}

int set_size(const RashomonSet& rs) { return static_cast<int>(rs.member_ids.size()); }

nlohmann::json pool_to_json(const ModelPool& pool) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : pool.models) models.push_back(learner::model_to_json(m));
  return {{"budget", pool.budget},
          {"seed", pool.seed},
          {"eval_name", pool.eval_name},
          {"models", std::move(models)}};
}

ModelPool pool_from_json(const nlohmann::json& j) {
  ModelPool pool;
  try {
    pool.budget = j.at("budget").get<int>();
    pool.seed = j.at("seed").get<std::uint64_t>();
    pool.eval_name = j.at("eval_name").get<std::string>();
    for (const auto& mj : j.at("models")) {
      pool.models.push_back(learner::model_from_json(mj));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaViolation, std::string("pool document: ") + e.what());
  }
  return pool;
}

void save_pool(const ModelPool& pool, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << pool_to_json(pool).dump(2) << '\n';
  if (!out) fail(ErrorCode::kIoError, "write failed: " + path);
}

ModelPool load_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaViolation, path + ": " + e.what());
  }
  return pool_from_json(j);
}

nlohmann::json rashomon_to_json(const ModelPool& pool, const RashomonSet& rs) {
  nlohmann::json losses = nlohmann::json::array();
  for (const auto& m : pool.models) losses.push_back(m.holdout_loss);
  return {{"losses", std::move(losses)},
          {"reference_id", rs.reference_id},
          {"epsilon", rs.epsilon},
          {"member_ids", rs.member_ids},
          {"member_losses", rs.member_losses}};
}

}  // namespace rashaudit::rashomon
