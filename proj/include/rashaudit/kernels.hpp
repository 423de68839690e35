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
#include <vector>

#include "rashaudit/matrix.hpp"

namespace rashaudit::kernels {

// Data-parallel inner loops used by the resamplers and the pool machinery.
// Each kernel has an OpenMP variant and a serial reference variant; both
// write per-item results to disjoint slots, so their outputs are required to
// be bit-identical (the unit tests and the bench target check this).

/// For each query row, the mean Euclidean distance to its k nearest rows of
/// `refs`. Ties at the k-th neighbor break by ascending reference index.
std::vector<double> mean_knn_distance(const Matrix& queries, const Matrix& refs, int k);
std::vector<double> mean_knn_distance_serial(const Matrix& queries, const Matrix& refs, int k);

/// For each row of `points`, the indices of its k nearest other rows
/// (self excluded), ordered by (distance, index).
std::vector<std::vector<int>> knn_indices(const Matrix& points, int k);
std::vector<std::vector<int>> knn_indices_serial(const Matrix& points, int k);

/// Squared Euclidean distance between two rows of length `cols`.
double squared_distance(const double* a, const double* b, std::size_t cols);

}  // namespace rashaudit::kernels
