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

#include "rashaudit/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <unordered_map>

#include "rashaudit/common.hpp"
#include "rashaudit/rng.hpp"

namespace rashaudit::multiplicity {

std::string aggregation_name(ViodAggregation a) {
  return a == ViodAggregation::kMin ? "min" : "max";
}

ViodAggregation parse_aggregation(const std::string& name) {
  if (name == "min") return ViodAggregation::kMin;
  if (name == "max") return ViodAggregation::kMax;
  fail(ErrorCode::kInvalidArgument, "viod aggregation must be \"min\" or \"max\"");
}

namespace {

// Members in presentation order: the reference model first, then the rest by
// ascending id.
std::vector<const learner::TrainedModel*> ordered_members(
    const rashomon::RashomonSet& rs, const rashomon::ModelPool& pool) {
  std::unordered_map<int, const learner::TrainedModel*> by_id;
  for (const auto& m : pool.models) by_id[m.id] = &m;

  std::vector<const learner::TrainedModel*> members;
  const auto ref = by_id.find(rs.reference_id);
  if (ref == by_id.end()) {
    fail(ErrorCode::kInvalidArgument, "reference model missing from pool");
  }
  members.push_back(ref->second);
  for (int id : rs.member_ids) {
    if (id == rs.reference_id) continue;
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      fail(ErrorCode::kInvalidArgument,
           "member " + std::to_string(id) + " missing from pool");
    }
    members.push_back(it->second);
  }
  return members;
}

}  // namespace

PredictionMatrix prediction_matrix(const rashomon::RashomonSet& rs,
                                   const rashomon::ModelPool& pool, const Matrix& X,
                                   double threshold, bool parallel) {
  if (X.rows == 0) fail(ErrorCode::kInvalidArgument, "empty evaluation matrix");
  const auto members = ordered_members(rs, pool);

  PredictionMatrix pm;
  pm.n_models = members.size();
  pm.n_samples = X.rows;
  pm.entries.assign(pm.n_models * pm.n_samples, 0);

  const auto n_members = static_cast<std::ptrdiff_t>(members.size());
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t f = 0; f < n_members; ++f) {
    try {
      const auto classes =
          learner::predict_class(*members[static_cast<std::size_t>(f)], X, threshold);
      std::uint8_t* row = pm.entries.data() + static_cast<std::size_t>(f) * pm.n_samples;
      for (std::size_t i = 0; i < pm.n_samples; ++i) {
        row[i] = static_cast<std::uint8_t>(classes[i]);
      }
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return pm;
}

double ambiguity(const PredictionMatrix& pm) {
  if (pm.n_models == 0) fail(ErrorCode::kInvalidArgument, "empty prediction matrix");
  if (pm.n_models == 1) return 0.0;
  const auto reference = pm.row(0);
  std::size_t conflicted = 0;
  for (std::size_t i = 0; i < pm.n_samples; ++i) {
    for (std::size_t f = 1; f < pm.n_models; ++f) {
      if (pm.row(f)[i] != reference[i]) {
        ++conflicted;
        break;
      }
    }
  }
  return static_cast<double>(conflicted) / static_cast<double>(pm.n_samples);
}

double discrepancy(const PredictionMatrix& pm) {
  if (pm.n_models == 0) fail(ErrorCode::kInvalidArgument, "empty prediction matrix");
  if (pm.n_models == 1) return 0.0;
  const auto reference = pm.row(0);
  double worst = 0.0;
  for (std::size_t f = 1; f < pm.n_models; ++f) {
    const auto row = pm.row(f);
    std::size_t conflicts = 0;
    for (std::size_t i = 0; i < pm.n_samples; ++i) {
      conflicts += static_cast<std::size_t>(row[i] != reference[i]);
    }
    worst = std::max(worst,
                     static_cast<double>(conflicts) / static_cast<double>(pm.n_samples));
  }
  return worst;
}

ImportanceVector permutation_importance(const learner::TrainedModel& m,
                                        const data::Dataset& d, int repeats,
                                        std::uint64_t seed, bool parallel) {
  if (repeats < 1) fail(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  const std::size_t p = d.n_features();
  const std::size_t n = d.n_samples();

  const double base_loss = learner::loss(m, d);

  ImportanceVector out;
  out.repeats = repeats;
  out.seed = seed;
  out.values.assign(p, 0.0);

  const auto pf = static_cast<std::ptrdiff_t>(p);
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t jj = 0; jj < pf; ++jj) {
    try {
      const auto j = static_cast<std::size_t>(jj);
      const auto column = d.features.column(j);
      std::vector<double> shuffled(n);
      double total = 0.0;
      for (int r = 0; r < repeats; ++r) {
        Rng rng(seed_combine(seed_combine(seed_combine(seed, "permute"), j),
                             static_cast<std::uint64_t>(r)));
        const auto perm = rng.permutation(n);
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = column[perm[i]];
        const auto proba = learner::predict_proba_substituted(m, d.features, j, shuffled);
        total += (1.0 - learner::auc(proba, d.labels)) - base_loss;
      }
      out.values[j] = total / repeats;
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kLengthMismatch, "kendall_tau: input lengths differ");
  }
  const std::size_t n = a.size();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "kendall_tau needs length >= 2");

  // O(n^2) concordant/discordant counting; importance vectors are short.
  long long concordant = 0;
  long long discordant = 0;
  long long ties_a = 0;
  long long ties_b = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) {
        ++ties_a;
        ++ties_b;
      } else if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  // One sqrt of the exact integer product, so tie-free identical rankings
  // come out at exactly 1.
  const double denom =
      std::sqrt(static_cast<double>((n0 - ties_a) * (n0 - ties_b)));
  if (denom == 0.0) {
    fail(ErrorCode::kAllTied, "kendall_tau undefined: an input is fully tied");
  }
  return static_cast<double>(concordant - discordant) / denom;
}

double viod(const rashomon::RashomonSet& rs, const rashomon::ModelPool& pool,
            const data::Dataset& d, int repeats, std::uint64_t seed,
            ViodAggregation aggregation, bool parallel) {
  if (d.n_features() < 2) {
    fail(ErrorCode::kInvalidArgument, "viod needs at least 2 features");
  }
  const auto members = ordered_members(rs, pool);
  if (members.size() == 1) return 1.0;

  std::vector<ImportanceVector> importances(members.size());
  const auto n_members = static_cast<std::ptrdiff_t>(members.size());
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t f = 0; f < n_members; ++f) {
    try {
      // Inner loops run serially here; members are the parallel unit.
      importances[static_cast<std::size_t>(f)] = permutation_importance(
          *members[static_cast<std::size_t>(f)], d, repeats, seed, false);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  double extremal = aggregation == ViodAggregation::kMin
                        ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
  for (std::size_t f = 1; f < members.size(); ++f) {
    const double tau = kendall_tau(importances[0].values, importances[f].values);
    extremal = aggregation == ViodAggregation::kMin ? std::min(extremal, tau)
                                                    : std::max(extremal, tau);
  }
  return extremal;
}

}  // namespace rashaudit::multiplicity
