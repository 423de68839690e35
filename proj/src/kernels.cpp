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

#include "rashaudit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rashaudit/common.hpp"

namespace rashaudit::kernels {

double squared_distance(const double* a, const double* b, std::size_t cols) {
  double sum = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    const double diff = a[c] - b[c];
    sum += diff * diff;
  }
  return sum;
}

namespace {

// Mean distance from one query row to its k nearest reference rows.
double query_mean_knn(const Matrix& queries, const Matrix& refs, int k,
                      std::size_t q, std::vector<std::pair<double, int>>& scratch) {
  scratch.clear();
  const double* qrow = queries.row(q);
  for (std::size_t r = 0; r < refs.rows; ++r) {
    scratch.emplace_back(squared_distance(qrow, refs.row(r), refs.cols),
                         static_cast<int>(r));
  }
  const auto kth = scratch.begin() + k;
  std::partial_sort(scratch.begin(), kth, scratch.end());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += std::sqrt(scratch[i].first);
  return sum / k;
}

std::vector<int> point_knn(const Matrix& points, int k, std::size_t q,
                           std::vector<std::pair<double, int>>& scratch) {
  scratch.clear();
  const double* qrow = points.row(q);
  for (std::size_t r = 0; r < points.rows; ++r) {
    if (r == q) continue;
    scratch.emplace_back(squared_distance(qrow, points.row(r), points.cols),
                         static_cast<int>(r));
  }
  const auto kth = scratch.begin() + k;
  std::partial_sort(scratch.begin(), kth, scratch.end());
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) out[i] = scratch[i].second;
  return out;
}

void validate_knn_args(std::size_t available, int k, const char* what) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, std::string(what) + ": k must be >= 1");
  if (static_cast<std::size_t>(k) > available) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": k exceeds the number of candidate rows");
  }
}

}  // namespace

std::vector<double> mean_knn_distance(const Matrix& queries, const Matrix& refs, int k) {
  validate_knn_args(refs.rows, k, "mean_knn_distance");
  std::vector<double> out(queries.rows);
  const auto n = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel
  {
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(refs.rows);
#pragma omp for schedule(static)
    for (std::ptrdiff_t q = 0; q < n; ++q) {
      out[q] = query_mean_knn(queries, refs, k, static_cast<std::size_t>(q), scratch);
    }
  }
  return out;
}

std::vector<double> mean_knn_distance_serial(const Matrix& queries, const Matrix& refs,
                                             int k) {
  validate_knn_args(refs.rows, k, "mean_knn_distance");
  std::vector<double> out(queries.rows);
  std::vector<std::pair<double, int>> scratch;
  scratch.reserve(refs.rows);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    out[q] = query_mean_knn(queries, refs, k, q, scratch);
  }
  return out;
}

std::vector<std::vector<int>> knn_indices(const Matrix& points, int k) {
  validate_knn_args(points.rows > 0 ? points.rows - 1 : 0, k, "knn_indices");
  std::vector<std::vector<int>> out(points.rows);
  const auto n = static_cast<std::ptrdiff_t>(points.rows);
#pragma omp parallel
  {
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(points.rows);
#pragma omp for schedule(static)
    for (std::ptrdiff_t q = 0; q < n; ++q) {
      out[q] = point_knn(points, k, static_cast<std::size_t>(q), scratch);
    }
  }
  return out;
}

std::vector<std::vector<int>> knn_indices_serial(const Matrix& points, int k) {
  validate_knn_args(points.rows > 0 ? points.rows - 1 : 0, k, "knn_indices");
  std::vector<std::vector<int>> out(points.rows);
  std::vector<std::pair<double, int>> scratch;
  scratch.reserve(points.rows);
  for (std::size_t q = 0; q < points.rows; ++q) {
    out[q] = point_knn(points, k, q, scratch);
  }
  return out;
}

}  // namespace rashaudit::kernels
