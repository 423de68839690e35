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

#include "rashaudit/multiplicity.hpp"
#include "rashaudit/report.hpp"
#include "rashaudit/resample.hpp"

namespace rashaudit::harness {

/// Environment variable bounding the worker count (defaults to the number
/// of processors).
inline constexpr const char* kThreadsEnvVar = "RASHAUDIT_THREADS";

struct DatasetRef {
  std::string path;
  std::string target;
  std::string name;  // defaults to the file stem
};

struct ExperimentConfig {
  std::vector<DatasetRef> datasets;
  std::vector<resample::Method> methods = {
      resample::Method::kRandomOversample,
      resample::Method::kSmote,
      resample::Method::kRandomUndersample,
      resample::Method::kNearMiss,
  };
  std::vector<double> ratios = {1.0, 1.05, 1.10, 1.15, 1.20, 1.25};
  double epsilon = 0.05;
  int pool_budget = 15;
  double split_fraction = 0.7;
  double threshold = 0.5;
  int smote_k = 5;
  int nearmiss_k = 3;
  int importance_repeats = 5;
  multiplicity::ViodAggregation viod_aggregation = multiplicity::ViodAggregation::kMin;
  std::uint64_t seed = 0;
  int seed_repeats = 5;
  std::string output_dir = "out";
  rashomon::HyperparameterSpace space;
};

/// Parses and validates a config document. Defaults are applied; every
/// violation (including unknown keys) is reported at once, each with its
/// field path, via a single SchemaViolation error.
ExperimentConfig validate_config(const nlohmann::json& document);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct StatRow {
  std::string metric;
  std::string test;
  std::string item_a;  // empty for omnibus rows
  std::string item_b;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

struct CellRecord {
  std::string dataset;
  std::string method;
  double ratio = 1.0;
  std::string status;  // "ok" or "skipped"
  std::string error;
  double wall_ms = 0.0;
  std::vector<multiplicity::MultiplicityReport> reports;  // one per seed repeat
};

struct RunRecord {
  std::string version;
  std::string started_at;  // the only timestamp in any output
  double total_wall_ms = 0.0;
  std::vector<CellRecord> cells;
  std::vector<std::string> notes;
};

struct ExperimentOutput {
  report::ResultsTable table;
  std::vector<StatRow> stats;
  RunRecord record;
};

/// Runs the full grid: per dataset, one stratified split per seed repeat, a
/// baseline pool on the unbalanced train partition, then one cell per
/// (method, ratio). Cells that fail are logged and skipped; the run
/// continues. Writes results.csv, stats.csv, the plot set and
/// run_record.json into cfg.output_dir.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

void write_stats_csv(const std::vector<StatRow>& stats, const std::string& path);

/// Statistical summary used by both run_experiment and the `plot`
/// subcommand: Kruskal-Wallis plus Dunn (Holm) across methods per metric,
/// and a Friedman test per metric with ratios as treatments and
/// (dataset, method) pairs as blocks (seed repeats reduced by median).
std::vector<StatRow> compute_stats(const report::ResultsTable& table,
                                   std::vector<std::string>* notes = nullptr);

/// Regenerates every plot family from a results table.
void write_plots(const report::ResultsTable& table, const std::string& out_dir,
                 std::vector<std::string>* notes = nullptr);

/// Entry point behind the CLI binary. Exit codes: 0 success, 1 usage error,
/// 2 data/processing error.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace rashaudit::harness
