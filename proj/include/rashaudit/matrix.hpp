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

#include <cstddef>
#include <vector>

namespace rashaudit {

/// Dense row-major matrix of doubles. Rows are observations, columns are
/// variables everywhere in this codebase.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  const double* row(std::size_t r) const { return values.data() + r * cols; }
  double* row(std::size_t r) { return values.data() + r * cols; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = (*this)(r, c);
    return out;
  }

  /// New matrix holding the given rows, in the given order.
  Matrix take_rows(const std::vector<std::size_t>& indices) const {
    Matrix out(indices.size(), cols);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const double* src = row(indices[i]);
      double* dst = out.row(i);
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c];
    }
    return out;
  }

  bool operator==(const Matrix& other) const = default;
};

}  // namespace rashaudit
