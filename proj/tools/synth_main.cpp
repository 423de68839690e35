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

// Regenerates the bundled benchmark replicas under data/.
//
// The originals live in public repositories; this toolkit ships offline
// stand-ins instead: class-conditional Gaussian tables that reproduce each
// benchmark dataset's published sample count, variable count and imbalance
// ratio exactly, with enough class signal that tree learners reach a
// non-trivial AUC. Generation is fully deterministic, so the committed CSVs
// can always be rebuilt bit-identically.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rashaudit/rng.hpp"

namespace {

using rashaudit::Rng;
using rashaudit::hash_text;
using rashaudit::seed_combine;

struct BenchmarkSpec {
  const char* name;
  double ratio;
  long long samples;
  int variables;
  bool bundled;
};

// The full benchmark manifest; only the small datasets are bundled as CSVs.
constexpr BenchmarkSpec kBenchmark[] = {
    {"spambase", 1.54, 4601, 55, false},
    {"MagicTelescope", 1.84, 19020, 10, false},
    {"steel-plates-fault", 1.88, 1941, 13, false},
    {"phoneme", 2.41, 5404, 5, true},
    {"jm1", 4.17, 10880, 17, false},
    {"SpeedDating", 4.63, 1048, 18, false},
    {"kc1", 5.47, 2109, 17, false},
    {"churn", 6.07, 5000, 8, true},
    {"pc4", 7.19, 1458, 12, false},
    {"pc3", 8.77, 1563, 14, false},
    {"abalone", 9.68, 4177, 7, true},
    {"us_crime", 12.29, 1994, 100, false},
    {"yeast_ml8", 12.58, 2417, 103, false},
    {"pc1", 13.40, 1109, 17, true},
    {"ozone-level-8hr", 14.84, 2534, 72, false},
    {"wilt", 17.54, 4839, 5, true},
    {"wine_quality", 25.77, 4898, 11, false},
    {"yeast_me2", 28.10, 1484, 8, true},
    {"mammography", 42.01, 11183, 6, false},
    {"abalone_19", 129.53, 4177, 7, false},
};

// Minority count that best realizes the published ratio for n samples.
long long minority_count_for(long long n, double ratio) {
  const auto guess = static_cast<long long>(std::llround(static_cast<double>(n) / (1.0 + ratio)));
  long long best = std::max<long long>(1, guess);
  double best_err = std::numeric_limits<double>::infinity();
  for (long long m = std::max<long long>(1, guess - 2); m <= guess + 2 && m < n; ++m) {
    const double err = std::abs(static_cast<double>(n - m) / static_cast<double>(m) - ratio);
    if (err < best_err) {
      best_err = err;
      best = m;
    }
  }
  return best;
}

double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.next_unit();  // (0, 1]
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void write_dataset(const BenchmarkSpec& spec, const std::string& out_dir) {
  const long long minority = minority_count_for(spec.samples, spec.ratio);
  const long long majority = spec.samples - minority;
  const int p = spec.variables;
  const int informative = std::max(2, (p + 1) / 2);

  Rng rng(seed_combine(hash_text("rashaudit-benchmark"), spec.name));

  // Per-feature minority shift; larger shifts on the informative features
  // leave the classes separable but overlapping.
  std::vector<double> shift(static_cast<std::size_t>(p), 0.0);
  for (int j = 0; j < informative; ++j) {
    shift[static_cast<std::size_t>(j)] = 0.4 + 0.8 * rng.next_unit();
  }

  struct Row {
    std::vector<double> values;
    bool positive;
  };
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(spec.samples));
  for (long long i = 0; i < spec.samples; ++i) {
    const bool positive = i >= majority;
    Row row;
    row.positive = positive;
    row.values.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
      double v = gaussian(rng);
      if (positive) v += shift[static_cast<std::size_t>(j)];
      row.values[static_cast<std::size_t>(j)] = v;
    }
    rows.push_back(std::move(row));
  }
  rng.shuffle(rows);

  const auto path = std::filesystem::path(out_dir) / (std::string(spec.name) + ".csv");
  std::ofstream out(path, std::ios::binary);
  for (int j = 1; j <= p; ++j) out << "v" << j << ',';
  out << "class\n";
  char buf[32];
  for (const auto& row : rows) {
    for (double v : row.values) {
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      out << buf << ',';
    }
    out << (row.positive ? "pos" : "neg") << '\n';
  }
  std::printf("%-12s %6lld samples, %3d variables, ratio %.4f -> %s\n", spec.name,
              spec.samples, p, static_cast<double>(majority) / static_cast<double>(minority),
              path.c_str());
}

void write_manifest(const std::string& out_dir) {
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& spec : kBenchmark) {
    manifest.push_back({{"name", spec.name},
                        {"imbalance_ratio", spec.ratio},
                        {"n_samples", spec.samples},
                        {"n_variables", spec.variables}});
  }
  const auto path = std::filesystem::path(out_dir) / "manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  std::printf("manifest -> %s\n", path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerate the bundled benchmark replica CSVs and manifest"};
  std::string out_dir = "data";
  app.add_option("--out", out_dir, "Output directory (default data)");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  for (const auto& spec : kBenchmark) {
    if (spec.bundled) write_dataset(spec, out_dir);
  }
  write_manifest(out_dir);
  return 0;
}
