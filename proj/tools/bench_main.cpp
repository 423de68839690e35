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

// Compares the OpenMP kernels against their serial reference paths on
// synthetic workloads sized like one experiment cell. Exits non-zero if any
// pair of outputs diverges; the speedup column is informational.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "rashaudit/kernels.hpp"
#include "rashaudit/multiplicity.hpp"
#include "rashaudit/rashomon.hpp"
#include "rashaudit/rng.hpp"

namespace {

using namespace rashaudit;

data::Dataset synth_dataset(std::size_t n, std::size_t p, double minority_fraction,
                            std::uint64_t seed) {
  Rng rng(seed);
  data::Dataset d;
  d.name = "bench";
  d.features = Matrix(n, p);
  d.labels.resize(n);
  for (std::size_t j = 0; j < p; ++j) d.column_names.push_back("v" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = rng.next_unit() < minority_fraction;
    d.labels[i] = positive ? 1 : 0;
    for (std::size_t j = 0; j < p; ++j) {
      double v = rng.next_unit() * 2.0 - 1.0;
      if (positive && j < 3) v += 0.8;
      d.features(i, j) = v;
    }
  }
  return d;
}

template <typename F>
double time_best_of(F&& fn, int reps = 3) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    fn();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best * 1000.0;
}

int g_failures = 0;

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "outputs identical" : "OUTPUTS DIFFER");
  if (!identical) ++g_failures;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    const auto majority = synth_dataset(4000, 10, 0.0, 11).features;
    const auto minority = synth_dataset(400, 10, 1.0, 12).features;
    std::vector<double> serial_out;
    std::vector<double> parallel_out;
    const double ts = time_best_of(
        [&] { serial_out = kernels::mean_knn_distance_serial(majority, minority, 3); });
    const double tp = time_best_of(
        [&] { parallel_out = kernels::mean_knn_distance(majority, minority, 3); });
    row("mean_knn_distance", ts, tp, serial_out == parallel_out);
  }

  {
    const auto points = synth_dataset(1500, 10, 1.0, 13).features;
    std::vector<std::vector<int>> serial_out;
    std::vector<std::vector<int>> parallel_out;
    const double ts =
        time_best_of([&] { serial_out = kernels::knn_indices_serial(points, 5); });
    const double tp = time_best_of([&] { parallel_out = kernels::knn_indices(points, 5); });
    row("knn_indices", ts, tp, serial_out == parallel_out);
  }

  const auto train = synth_dataset(3000, 10, 0.2, 14);
  const auto eval = synth_dataset(1200, 10, 0.2, 15);
  rashomon::HyperparameterSpace space;

  rashomon::ModelPool pool_serial;
  rashomon::ModelPool pool_parallel;
  {
    const double ts = time_best_of(
        [&] { pool_serial = rashomon::build_pool(train, eval, space, 15, 7, false); }, 1);
    const double tp = time_best_of(
        [&] { pool_parallel = rashomon::build_pool(train, eval, space, 15, 7, true); }, 1);
    bool identical = pool_serial.models.size() == pool_parallel.models.size();
    for (std::size_t i = 0; identical && i < pool_serial.models.size(); ++i) {
      identical = pool_serial.models[i].holdout_loss == pool_parallel.models[i].holdout_loss;
    }
    row("build_pool (15 models)", ts, tp, identical);
  }

  const auto rs = rashomon::rashomon_set(pool_serial, 0.05);
  {
    multiplicity::PredictionMatrix serial_out;
    multiplicity::PredictionMatrix parallel_out;
    const double ts = time_best_of([&] {
      serial_out = multiplicity::prediction_matrix(rs, pool_serial, eval.features, 0.5, false);
    });
    const double tp = time_best_of([&] {
      parallel_out = multiplicity::prediction_matrix(rs, pool_serial, eval.features, 0.5, true);
    });
    row("prediction_matrix", ts, tp, serial_out.entries == parallel_out.entries);
  }

  {
    const auto& model = pool_serial.models.front();
    multiplicity::ImportanceVector serial_out;
    multiplicity::ImportanceVector parallel_out;
    const double ts = time_best_of(
        [&] { serial_out = multiplicity::permutation_importance(model, eval, 5, 3, false); }, 1);
    const double tp = time_best_of(
        [&] { parallel_out = multiplicity::permutation_importance(model, eval, 5, 3, true); }, 1);
    row("permutation_importance", ts, tp, serial_out.values == parallel_out.values);
  }

  if (g_failures > 0) {
    std::printf("\n%d kernel(s) diverged between serial and OpenMP paths\n", g_failures);
    return 1;
  }
  std::printf("\nall kernels bit-identical across serial and OpenMP paths\n");
  return 0;
}
