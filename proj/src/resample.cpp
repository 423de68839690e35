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

#include "rashaudit/resample.hpp"

#include <algorithm>
#include <cmath>

#include "rashaudit/common.hpp"
#include "rashaudit/kernels.hpp"
#include "rashaudit/rng.hpp"

namespace rashaudit::resample {

std::string method_name(Method m) {
  switch (m) {
    case Method::kNone: return "original";
    case Method::kRandomOversample: return "random_oversample";
    case Method::kSmote: return "smote";
    case Method::kRandomUndersample: return "random_undersample";
    case Method::kNearMiss: return "near_miss";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "original" || name == "none") return Method::kNone;
  if (name == "random_oversample") return Method::kRandomOversample;
  if (name == "smote") return Method::kSmote;
  if (name == "random_undersample") return Method::kRandomUndersample;
  if (name == "near_miss") return Method::kNearMiss;
  fail(ErrorCode::kInvalidArgument, "unknown balancing method \"" + name + "\"");
}

long long target_minority_count(long long majority_count, double target_ratio) {
  if (majority_count < 1) fail(ErrorCode::kInvalidArgument, "majority_count < 1");
  if (target_ratio < 1.0) fail(ErrorCode::kInvalidArgument, "target_ratio < 1");
  return std::llround(static_cast<double>(majority_count) / target_ratio);
}

namespace {

void validate_spec(const ResampleSpec& spec) {
  if (spec.target_ratio < 1.0) {
    fail(ErrorCode::kInvalidArgument, "target_ratio must be >= 1");
  }
}

data::Dataset append_minority_rows(const data::Dataset& d, const Matrix& extra) {
  data::Dataset out;
  out.name = d.name;
  out.column_names = d.column_names;
  out.features = Matrix(d.n_samples() + extra.rows, d.n_features());
  std::copy(d.features.values.begin(), d.features.values.end(),
            out.features.values.begin());
  std::copy(extra.values.begin(), extra.values.end(),
            out.features.values.begin() + static_cast<std::ptrdiff_t>(
                                               d.features.values.size()));
  out.labels = d.labels;
  out.labels.insert(out.labels.end(), extra.rows, 1);
  return out;
}

data::Dataset keep_rows(const data::Dataset& d, std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  data::Dataset out;
  out.name = d.name;
  out.column_names = d.column_names;
  out.features = d.features.take_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(d.labels[r]);
  return out;
}

}  // namespace

ResampleResult random_oversample(const data::Dataset& d, const ResampleSpec& spec) {
  validate_spec(spec);
  const auto summary = data::imbalance_ratio(d);
  if (summary.ratio < spec.target_ratio) return {d, false};

  const long long target = target_minority_count(summary.majority_count, spec.target_ratio);
  const long long extra_count = target - summary.minority_count;
  if (extra_count <= 0) return {d, true};

  const auto minority = data::class_indices(d, 1);
  Matrix extra(static_cast<std::size_t>(extra_count), d.n_features());
  Rng rng(seed_combine(spec.seed, "random_oversample"));
  for (long long i = 0; i < extra_count; ++i) {
    const std::size_t pick = minority[rng.next_below(minority.size())];
    const double* src = d.features.row(pick);
    std::copy(src, src + d.n_features(), extra.row(static_cast<std::size_t>(i)));
  }
  return {append_minority_rows(d, extra), true};
}

ResampleResult smote(const data::Dataset& d, const ResampleSpec& spec) {
  validate_spec(spec);
  const auto summary = data::imbalance_ratio(d);
  if (summary.minority_count < 2) {
    fail(ErrorCode::kMinorityTooSmall,
         "smote needs at least 2 minority samples, got " +
             std::to_string(summary.minority_count));
  }
  if (spec.k_neighbors < 1) fail(ErrorCode::kInvalidArgument, "k_neighbors < 1");
  if (summary.ratio < spec.target_ratio) return {d, false};

  const long long target = target_minority_count(summary.majority_count, spec.target_ratio);
  const long long extra_count = target - summary.minority_count;
  if (extra_count <= 0) return {d, true};

  const auto minority_rows = data::class_indices(d, 1);
  const Matrix minority = d.features.take_rows(minority_rows);
  const int k = std::min<long long>(spec.k_neighbors, summary.minority_count - 1);
  const auto neighbors = kernels::knn_indices(minority, k);

  const std::size_t p = d.n_features();
  Matrix extra(static_cast<std::size_t>(extra_count), p);
  Rng rng(seed_combine(spec.seed, "smote"));
  for (long long i = 0; i < extra_count; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) % minority.rows;
    const int nn = neighbors[base][rng.next_below(static_cast<std::uint64_t>(k))];
    const double lambda = rng.next_unit();
    const double* a = minority.row(base);
    const double* b = minority.row(static_cast<std::size_t>(nn));
    double* dst = extra.row(static_cast<std::size_t>(i));
    for (std::size_t c = 0; c < p; ++c) {
      const double value = a[c] + lambda * (b[c] - a[c]);
      // The interpolant lies on the segment between the parents; clamp so
      // floating-point rounding cannot step outside it.
      dst[c] = std::clamp(value, std::min(a[c], b[c]), std::max(a[c], b[c]));
    }
  }
  return {append_minority_rows(d, extra), true};
}

ResampleResult random_undersample(const data::Dataset& d, const ResampleSpec& spec) {
  validate_spec(spec);
  const auto summary = data::imbalance_ratio(d);
  if (summary.ratio < spec.target_ratio) return {d, false};

  const auto keep_count = static_cast<std::size_t>(std::llround(
      static_cast<double>(summary.minority_count) * spec.target_ratio));
  auto majority = data::class_indices(d, 0);
  if (keep_count >= majority.size()) return {d, true};

  Rng rng(seed_combine(spec.seed, "random_undersample"));
  rng.shuffle(majority);
  std::vector<std::size_t> rows(majority.begin(),
                                majority.begin() + static_cast<std::ptrdiff_t>(keep_count));
  const auto minority = data::class_indices(d, 1);
  rows.insert(rows.end(), minority.begin(), minority.end());
  return {keep_rows(d, std::move(rows)), true};
}

ResampleResult near_miss(const data::Dataset& d, const ResampleSpec& spec) {
  validate_spec(spec);
  const auto summary = data::imbalance_ratio(d);
  if (spec.k_neighbors < 1) fail(ErrorCode::kInvalidArgument, "k_neighbors < 1");
  if (summary.minority_count < spec.k_neighbors) {
    fail(ErrorCode::kMinorityTooSmall,
         "near_miss with k=" + std::to_string(spec.k_neighbors) + " needs >= k minority samples, got " +
             std::to_string(summary.minority_count));
  }
  if (summary.ratio < spec.target_ratio) return {d, false};

  const auto keep_count = static_cast<std::size_t>(std::llround(
      static_cast<double>(summary.minority_count) * spec.target_ratio));
  const auto majority = data::class_indices(d, 0);
  if (keep_count >= majority.size()) return {d, true};

  const auto minority_rows = data::class_indices(d, 1);
  const Matrix majority_features = d.features.take_rows(majority);
  const Matrix minority_features = d.features.take_rows(minority_rows);
  const auto mean_dist =
      kernels::mean_knn_distance(majority_features, minority_features, spec.k_neighbors);

  // Rank majority rows by mean distance, ties by original row index.
  std::vector<std::size_t> order(majority.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mean_dist[a] != mean_dist[b]) return mean_dist[a] < mean_dist[b];
    return majority[a] < majority[b];
  });

  std::vector<std::size_t> rows;
  rows.reserve(keep_count + minority_rows.size());
  for (std::size_t i = 0; i < keep_count; ++i) rows.push_back(majority[order[i]]);
  rows.insert(rows.end(), minority_rows.begin(), minority_rows.end());
  return {keep_rows(d, std::move(rows)), true};
}

ResampleResult apply(const data::Dataset& d, const ResampleSpec& spec) {
  switch (spec.method) {
    case Method::kNone: return {d, false};
    case Method::kRandomOversample: return random_oversample(d, spec);
    case Method::kSmote: return smote(d, spec);
    case Method::kRandomUndersample: return random_undersample(d, spec);
    case Method::kNearMiss: return near_miss(d, spec);
  }
  fail(ErrorCode::kInvalidArgument, "unhandled method");
}

}  // namespace rashaudit::resample
