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

#include "rashaudit/dataset.hpp"

namespace rashaudit::resample {

enum class Method {
  kNone,
  kRandomOversample,
  kSmote,
  kRandomUndersample,
  kNearMiss,
};

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct ResampleSpec {
  Method method = Method::kNone;
  double target_ratio = 1.0;  // majority/minority after balancing, >= 1
  int k_neighbors = 5;        // smote and near_miss only
  std::uint64_t seed = 0;
};

/// `applied` is false when the input was already at or below the target
/// ratio, in which case `dataset` is the input unchanged.
struct ResampleResult {
  data::Dataset dataset;
  bool applied = true;
};

/// Minority size that realizes the target ratio when oversampling:
/// round(majority / target_ratio).
long long target_minority_count(long long majority_count, double target_ratio);

/// Duplicates uniformly chosen minority rows (with replacement) until the
/// minority count reaches target_minority_count. Majority rows untouched;
/// duplicates are appended after the original rows.
ResampleResult random_oversample(const data::Dataset& d, const ResampleSpec& spec);

/// Chawla-style synthetic oversampling: each synthetic row interpolates a
/// cyclically chosen minority seed point toward one of its k nearest
/// minority neighbors with a uniform random step in [0, 1].
ResampleResult smote(const data::Dataset& d, const ResampleSpec& spec);

/// Keeps a uniform random subset of round(minority * target_ratio) majority
/// rows; minority rows untouched. Kept rows stay in input order.
ResampleResult random_undersample(const data::Dataset& d, const ResampleSpec& spec);

/// NearMiss-1: keeps the majority rows with the smallest mean Euclidean
/// distance to their k nearest minority points. Fully deterministic; ties
/// break by ascending original row index.
ResampleResult near_miss(const data::Dataset& d, const ResampleSpec& spec);

/// Dispatch on spec.method (kNone returns the input with applied = false).
ResampleResult apply(const data::Dataset& d, const ResampleSpec& spec);

}  // namespace rashaudit::resample
