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

#include "rashaudit/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rashaudit/common.hpp"
#include "rashaudit/rng.hpp"

namespace rashaudit::harness {

namespace {

using nlohmann::json;

std::string ratio_key(double ratio) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", ratio);
  return buf;
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset,
                        const std::string& method, double ratio, int rep,
                        const std::string& purpose) {
  std::uint64_t h = seed_combine(master, dataset);
  h = seed_combine(h, method);
  h = seed_combine(h, ratio_key(ratio));
  h = seed_combine(h, static_cast<std::uint64_t>(rep));
  return seed_combine(h, purpose);
}

int method_rank(const std::string& method) {
  if (method == "original") return 0;
  if (method == "random_oversample") return 1;
  if (method == "smote") return 2;
  if (method == "random_undersample") return 3;
  if (method == "near_miss") return 4;
  return 5;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

// --------------------------------------------------------------------------
// Config validation
// --------------------------------------------------------------------------

namespace {

struct Violations {
  std::vector<std::string> items;

  void add(const std::string& path, const std::string& problem) {
    items.push_back(path + ": " + problem);
  }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string joined;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) joined += "; ";
      joined += items[i];
    }
    fail(ErrorCode::kSchemaViolation, joined);
  }
};

bool get_int_field(const json& j, const std::string& path, Violations& v, int lo,
                   int* out) {
  if (!j.is_number_integer()) {
    v.add(path, "must be an integer");
    return false;
  }
  const auto value = j.get<long long>();
  if (value < lo) {
    v.add(path, "must be >= " + std::to_string(lo));
    return false;
  }
  *out = static_cast<int>(value);
  return true;
}

bool get_real_field(const json& j, const std::string& path, Violations& v, double* out) {
  if (!j.is_number()) {
    v.add(path, "must be a number");
    return false;
  }
  *out = j.get<double>();
  return true;
}

void parse_int_range(const json& j, const std::string& path, Violations& v, int lo,
                     int* out_min, int* out_max) {
  if (!j.is_array() || j.size() != 2) {
    v.add(path, "must be a [min, max] pair");
    return;
  }
  int a = 0;
  int b = 0;
  if (!get_int_field(j[0], path + "[0]", v, lo, &a)) return;
  if (!get_int_field(j[1], path + "[1]", v, lo, &b)) return;
  if (a > b) {
    v.add(path, "min exceeds max");
    return;
  }
  *out_min = a;
  *out_max = b;
}

void parse_space(const json& j, Violations& v, rashomon::HyperparameterSpace* space) {
  if (!j.is_object()) {
    v.add("hyperparameter_space", "must be an object");
    return;
  }
  static const std::set<std::string> known = {"tree_weight", "max_depth",
                                              "min_samples_leaf", "n_trees",
                                              "feature_fraction"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) v.add("hyperparameter_space." + key, "unknown key");
  }
  if (j.contains("tree_weight")) {
    double w = 0;
    if (get_real_field(j["tree_weight"], "hyperparameter_space.tree_weight", v, &w)) {
      if (w < 0.0 || w > 1.0) {
        v.add("hyperparameter_space.tree_weight", "must lie in [0, 1]");
      } else {
        space->tree_weight = w;
      }
    }
  }
  if (j.contains("max_depth")) {
    parse_int_range(j["max_depth"], "hyperparameter_space.max_depth", v, 1,
                    &space->max_depth_min, &space->max_depth_max);
  }
  if (j.contains("min_samples_leaf")) {
    parse_int_range(j["min_samples_leaf"], "hyperparameter_space.min_samples_leaf", v, 1,
                    &space->min_samples_leaf_min, &space->min_samples_leaf_max);
  }
  if (j.contains("n_trees")) {
    parse_int_range(j["n_trees"], "hyperparameter_space.n_trees", v, 1,
                    &space->n_trees_min, &space->n_trees_max);
  }
  if (j.contains("feature_fraction")) {
    const auto& ff = j["feature_fraction"];
    if (!ff.is_array() || ff.size() != 2 || !ff[0].is_number() || !ff[1].is_number()) {
      v.add("hyperparameter_space.feature_fraction", "must be a [min, max] pair");
    } else {
      const double a = ff[0].get<double>();
      const double b = ff[1].get<double>();
      if (!(a > 0.0 && a <= b && b <= 1.0)) {
        v.add("hyperparameter_space.feature_fraction", "must satisfy 0 < min <= max <= 1");
      } else {
        space->feature_fraction_min = a;
        space->feature_fraction_max = b;
      }
    }
  }
}

}  // namespace

ExperimentConfig validate_config(const json& document) {
  Violations v;
  ExperimentConfig cfg;

  if (!document.is_object()) {
    v.add("$", "config must be a JSON object");
    v.raise_if_any();
  }

  static const std::set<std::string> known = {
      "datasets",       "methods",         "ratios",
      "epsilon",        "pool_budget",     "split_fraction",
      "threshold",      "smote_k",         "nearmiss_k",
      "importance_repeats", "viod_aggregation", "seed",
      "seed_repeats",   "output_dir",      "hyperparameter_space"};
  for (const auto& [key, value] : document.items()) {
    if (!known.count(key)) v.add(key, "unknown key");
  }

  if (!document.contains("datasets")) {
    v.add("datasets", "required");
  } else if (!document["datasets"].is_array() || document["datasets"].empty()) {
    v.add("datasets", "must be a non-empty array");
  } else {
    std::size_t i = 0;
    for (const auto& item : document["datasets"]) {
      const std::string path = "datasets[" + std::to_string(i) + "]";
      if (!item.is_object()) {
        v.add(path, "must be an object");
      } else {
        DatasetRef ref;
        for (const auto& [key, value] : item.items()) {
          if (key != "path" && key != "target" && key != "name") {
            v.add(path + "." + key, "unknown key");
          }
        }
        if (!item.contains("path") || !item["path"].is_string()) {
          v.add(path + ".path", "required string");
        } else {
          ref.path = item["path"].get<std::string>();
        }
        if (!item.contains("target") || !item["target"].is_string()) {
          v.add(path + ".target", "required string");
        } else {
          ref.target = item["target"].get<std::string>();
        }
        if (item.contains("name")) {
          if (!item["name"].is_string()) {
            v.add(path + ".name", "must be a string");
          } else {
            ref.name = item["name"].get<std::string>();
          }
        }
        if (ref.name.empty() && !ref.path.empty()) {
          ref.name = std::filesystem::path(ref.path).stem().string();
        }
        cfg.datasets.push_back(std::move(ref));
      }
      ++i;
    }
  }

  if (document.contains("methods")) {
    if (!document["methods"].is_array() || document["methods"].empty()) {
      v.add("methods", "must be a non-empty array");
    } else {
      cfg.methods.clear();
      std::size_t i = 0;
      for (const auto& item : document["methods"]) {
        const std::string path = "methods[" + std::to_string(i) + "]";
        if (!item.is_string()) {
          v.add(path, "must be a string");
        } else {
          try {
            const auto method = resample::parse_method(item.get<std::string>());
            if (method == resample::Method::kNone) {
              v.add(path, "the baseline cell is implicit; list balancing methods only");
            } else {
              cfg.methods.push_back(method);
            }
          } catch (const Error&) {
            v.add(path, "unknown method \"" + item.get<std::string>() + "\"");
          }
        }
        ++i;
      }
    }
  }

  if (document.contains("ratios")) {
    if (!document["ratios"].is_array() || document["ratios"].empty()) {
      v.add("ratios", "must be a non-empty array");
    } else {
      cfg.ratios.clear();
      std::size_t i = 0;
      for (const auto& item : document["ratios"]) {
        const std::string path = "ratios[" + std::to_string(i) + "]";
        if (!item.is_number()) {
          v.add(path, "must be a number");
        } else {
          const double r = item.get<double>();
          if (r < 1.0) {
            v.add(path, "resampling ratio must be >= 1");
          } else {
            cfg.ratios.push_back(r);
          }
        }
        ++i;
      }
    }
  }

  if (document.contains("epsilon")) {
    double e = 0;
    if (get_real_field(document["epsilon"], "epsilon", v, &e)) {
      if (!(e > 0.0)) {
        v.add("epsilon", "must be > 0");
      } else {
        cfg.epsilon = e;
      }
    }
  }
  if (document.contains("pool_budget")) {
    get_int_field(document["pool_budget"], "pool_budget", v, 1, &cfg.pool_budget);
  }
  if (document.contains("split_fraction")) {
    double f = 0;
    if (get_real_field(document["split_fraction"], "split_fraction", v, &f)) {
      if (!(f > 0.5 && f < 0.95)) {
        v.add("split_fraction", "must lie in (0.5, 0.95)");
      } else {
        cfg.split_fraction = f;
      }
    }
  }
  if (document.contains("threshold")) {
    double t = 0;
    if (get_real_field(document["threshold"], "threshold", v, &t)) {
      if (!(t > 0.0 && t < 1.0)) {
        v.add("threshold", "must lie in (0, 1)");
      } else {
        cfg.threshold = t;
      }
    }
  }
  if (document.contains("smote_k")) {
    get_int_field(document["smote_k"], "smote_k", v, 1, &cfg.smote_k);
  }
  if (document.contains("nearmiss_k")) {
    get_int_field(document["nearmiss_k"], "nearmiss_k", v, 1, &cfg.nearmiss_k);
  }
  if (document.contains("importance_repeats")) {
    get_int_field(document["importance_repeats"], "importance_repeats", v, 1,
                  &cfg.importance_repeats);
  }
  if (document.contains("viod_aggregation")) {
    if (!document["viod_aggregation"].is_string()) {
      v.add("viod_aggregation", "must be \"min\" or \"max\"");
    } else {
      try {
        cfg.viod_aggregation =
            multiplicity::parse_aggregation(document["viod_aggregation"].get<std::string>());
      } catch (const Error&) {
        v.add("viod_aggregation", "must be \"min\" or \"max\"");
      }
    }
  }

  if (!document.contains("seed")) {
    v.add("seed", "required");
  } else if (!document["seed"].is_number_unsigned() &&
             !document["seed"].is_number_integer()) {
    v.add("seed", "must be a non-negative integer");
  } else if (document["seed"].is_number_integer() && document["seed"].get<long long>() < 0) {
    v.add("seed", "must be a non-negative integer");
  } else {
    cfg.seed = document["seed"].get<std::uint64_t>();
  }

  if (document.contains("seed_repeats")) {
    get_int_field(document["seed_repeats"], "seed_repeats", v, 1, &cfg.seed_repeats);
  }
  if (document.contains("output_dir")) {
    if (!document["output_dir"].is_string()) {
      v.add("output_dir", "must be a string");
    } else {
      cfg.output_dir = document["output_dir"].get<std::string>();
    }
  }
  if (document.contains("hyperparameter_space")) {
    parse_space(document["hyperparameter_space"], v, &cfg.space);
  }

  v.raise_if_any();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json datasets = json::array();
  for (const auto& d : cfg.datasets) {
    datasets.push_back({{"path", d.path}, {"target", d.target}, {"name", d.name}});
  }
  json methods = json::array();
  for (const auto& m : cfg.methods) methods.push_back(resample::method_name(m));
  return {{"datasets", std::move(datasets)},
          {"methods", std::move(methods)},
          {"ratios", cfg.ratios},
          {"epsilon", cfg.epsilon},
          {"pool_budget", cfg.pool_budget},
          {"split_fraction", cfg.split_fraction},
          {"threshold", cfg.threshold},
          {"smote_k", cfg.smote_k},
          {"nearmiss_k", cfg.nearmiss_k},
          {"importance_repeats", cfg.importance_repeats},
          {"viod_aggregation", multiplicity::aggregation_name(cfg.viod_aggregation)},
          {"seed", cfg.seed},
          {"seed_repeats", cfg.seed_repeats},
          {"output_dir", cfg.output_dir},
          {"hyperparameter_space",
           {{"tree_weight", cfg.space.tree_weight},
            {"max_depth", {cfg.space.max_depth_min, cfg.space.max_depth_max}},
            {"min_samples_leaf",
             {cfg.space.min_samples_leaf_min, cfg.space.min_samples_leaf_max}},
            {"n_trees", {cfg.space.n_trees_min, cfg.space.n_trees_max}},
            {"feature_fraction",
             {cfg.space.feature_fraction_min, cfg.space.feature_fraction_max}}}}};
}

// --------------------------------------------------------------------------
// Experiment execution
// --------------------------------------------------------------------------

namespace {

struct PreparedDataset {
  std::string name;
  data::Dataset full;
  double original_ratio = 1.0;
  std::vector<data::SplitPair> splits;       // one per seed repeat
  std::vector<double> baseline_auc;          // reference AUC per repeat
  CellRecord baseline_cell;
  bool baseline_ok = false;
};

multiplicity::MultiplicityReport evaluate_cell(const ExperimentConfig& cfg,
                                               const data::Dataset& train,
                                               const data::Dataset& test,
                                               const std::string& dataset,
                                               const std::string& method, double ratio,
                                               int rep) {
  const auto pool = rashomon::build_pool(
      train, test, cfg.space, cfg.pool_budget,
      cell_seed(cfg.seed, dataset, method, ratio, rep, "pool"), /*parallel=*/false);
  const auto rs = rashomon::rashomon_set(pool, cfg.epsilon);
  const auto pm =
      multiplicity::prediction_matrix(rs, pool, test.features, cfg.threshold,
                                      /*parallel=*/false);

  multiplicity::MultiplicityReport report;
  report.dataset = dataset;
  report.method = method;
  report.ratio = ratio;
  report.seed = static_cast<std::uint64_t>(rep);
  report.ambiguity = multiplicity::ambiguity(pm);
  report.discrepancy = multiplicity::discrepancy(pm);
  report.viod = multiplicity::viod(rs, pool, test, cfg.importance_repeats,
                                   cell_seed(cfg.seed, dataset, method, ratio, rep, "viod"),
                                   cfg.viod_aggregation, /*parallel=*/false);
  report.set_size = rashomon::set_size(rs);
  report.auc_reference = 1.0 - rs.member_losses[0];
  for (std::size_t i = 0; i < rs.member_ids.size(); ++i) {
    if (rs.member_ids[i] == rs.reference_id) {
      report.auc_reference = 1.0 - rs.member_losses[i];
    }
  }
  return report;
}

void append_rows(report::ResultsTable& table, const multiplicity::MultiplicityReport& r) {
  const std::pair<const char*, double> metrics[] = {
      {"ambiguity", r.ambiguity},
      {"discrepancy", r.discrepancy},
      {"viod", r.viod},
      {"set_size", static_cast<double>(r.set_size)},
  };
  for (const auto& [name, value] : metrics) {
    report::ResultRow row;
    row.dataset = r.dataset;
    row.method = r.method;
    row.ratio = r.ratio;
    row.seed = r.seed;
    row.metric = name;
    row.value = value;
    row.auc_reference = r.auc_reference;
    row.auc_gain = r.auc_gain;
    table.rows.push_back(std::move(row));
  }
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

json record_to_json(const RunRecord& record, const ExperimentConfig& cfg) {
  json cells = json::array();
  for (const auto& cell : record.cells) {
    json reports = json::array();
    for (const auto& r : cell.reports) {
      reports.push_back({{"seed", r.seed},
                         {"ambiguity", r.ambiguity},
                         {"discrepancy", r.discrepancy},
                         {"viod", r.viod},
                         {"set_size", r.set_size},
                         {"auc_reference", r.auc_reference},
                         {"auc_gain", r.auc_gain}});
    }
    cells.push_back({{"dataset", cell.dataset},
                     {"method", cell.method},
                     {"ratio", cell.ratio},
                     {"status", cell.status},
                     {"error", cell.error},
                     {"wall_ms", cell.wall_ms},
                     {"reports", std::move(reports)}});
  }
  return {{"version", record.version},
          {"started_at", record.started_at},
          {"total_wall_ms", record.total_wall_ms},
          {"config", config_to_json(cfg)},
          {"notes", record.notes},
          {"cells", std::move(cells)}};
}

}  // namespace

std::vector<StatRow> compute_stats(const report::ResultsTable& table,
                                   std::vector<std::string>* notes) {
  report::ResultsTable sorted = table;
  sorted.sort_rows();

  auto note = [&](const std::string& message) {
    if (notes) notes->push_back(message);
  };

  std::vector<StatRow> out;
  for (const char* metric : report::kMetricNames) {
    // Methods in canonical presentation order.
    std::vector<std::string> methods;
    for (const auto& r : sorted.rows) {
      if (r.metric != metric) continue;
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
        methods.push_back(r.method);
      }
    }
    std::sort(methods.begin(), methods.end(),
              [](const std::string& a, const std::string& b) {
                if (method_rank(a) != method_rank(b)) return method_rank(a) < method_rank(b);
                return a < b;
              });
    if (methods.size() < 2) continue;

    stats::GroupedSamples groups;
    for (const auto& method : methods) {
      std::vector<double> values;
      for (const auto& r : sorted.rows) {
        if (r.metric == metric && r.method == method) values.push_back(r.value);
      }
      groups.groups.emplace_back(method, std::move(values));
    }

    try {
      const auto kw = stats::kruskal_wallis(groups);
      out.push_back({metric, "kruskal_wallis", "", "", kw.statistic, kw.df, kw.p_value});
      const auto dunn = stats::dunn_pairwise(groups, stats::Adjustment::kHolm);
      for (std::size_t i = 0; i + 1 < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
          out.push_back({metric, "dunn_holm", methods[i], methods[j], 0.0, 0, dunn[i][j]});
        }
      }
    } catch (const Error& e) {
      note(std::string("kruskal_wallis skipped for ") + metric + ": " + e.what());
    }

    // Friedman: treatments are the resampling ratios, blocks are
    // (dataset, method) pairs, seed repeats reduced by median.
    std::set<double> ratio_set;
    for (const auto& r : sorted.rows) {
      if (r.metric == metric && r.method != "original") ratio_set.insert(r.ratio);
    }
    const std::vector<double> ratios(ratio_set.begin(), ratio_set.end());
    if (ratios.size() >= 2) {
      std::map<std::pair<std::string, std::string>, std::map<double, std::vector<double>>>
          blocks;
      for (const auto& r : sorted.rows) {
        if (r.metric != metric || r.method == "original") continue;
        blocks[{r.dataset, r.method}][r.ratio].push_back(r.value);
      }
      stats::BlockDesign design;
      for (const auto& [key, by_ratio] : blocks) {
        std::vector<double> row;
        for (double ratio : ratios) {
          const auto it = by_ratio.find(ratio);
          if (it == by_ratio.end()) break;
          row.push_back(median(it->second));
        }
        if (row.size() == ratios.size()) design.cells.push_back(std::move(row));
      }
      if (design.cells.size() >= 2) {
        try {
          const auto fr = stats::friedman(design);
          out.push_back(
              {metric, "friedman_ratio_blocks", "", "", fr.statistic, fr.df, fr.p_value});
        } catch (const Error& e) {
          note(std::string("friedman skipped for ") + metric + ": " + e.what());
        }
      } else {
        note(std::string("friedman skipped for ") + metric + ": fewer than 2 complete blocks");
      }
    }
  }
  return out;
}

void write_stats_csv(const std::vector<StatRow>& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << "metric,test,item_a,item_b,statistic,df,p_value\n";
  for (const auto& row : stats) {
    out << row.metric << ',' << row.test << ',' << row.item_a << ',' << row.item_b << ','
        << format_real(row.statistic) << ',' << row.df << ',' << format_real(row.p_value)
        << '\n';
  }
  if (!out) fail(ErrorCode::kIoError, "write failed: " + path);
}

void write_plots(const report::ResultsTable& table, const std::string& out_dir,
                 std::vector<std::string>* notes) {
  namespace fs = std::filesystem;
  auto note = [&](const std::string& message) {
    if (notes) notes->push_back(message);
  };

  try {
    report::zone_plot(table, (fs::path(out_dir) / "zone.svg").string());
  } catch (const Error& e) {
    note(std::string("zone plot skipped: ") + e.what());
  }

  report::ResultsTable sorted = table;
  sorted.sort_rows();
  for (const std::string metric : {"ambiguity", "discrepancy", "viod"}) {
    std::vector<std::string> methods;
    for (const auto& r : sorted.rows) {
      if (r.metric != metric) continue;
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
        methods.push_back(r.method);
      }
    }
    std::sort(methods.begin(), methods.end(),
              [](const std::string& a, const std::string& b) {
                if (method_rank(a) != method_rank(b)) return method_rank(a) < method_rank(b);
                return a < b;
              });

    stats::GroupedSamples groups;
    for (const auto& method : methods) {
      std::vector<double> values;
      for (const auto& r : sorted.rows) {
        if (r.metric == metric && r.method == method) values.push_back(r.value);
      }
      groups.groups.emplace_back(method, std::move(values));
    }

    if (groups.groups.size() >= 2) {
      try {
        report::PairwiseTests tests;
        tests.omnibus = stats::kruskal_wallis(groups);
        tests.labels = methods;
        try {
          tests.adjusted_p = stats::dunn_pairwise(groups, stats::Adjustment::kHolm);
        } catch (const Error&) {
          tests.adjusted_p.clear();
        }
        report::distribution_plot(
            groups, tests, metric,
            (fs::path(out_dir) / ("distribution_" + metric + ".svg")).string());
      } catch (const Error& e) {
        note("distribution plot skipped for " + metric + ": " + e.what());
      }
    }

    try {
      report::performance_gain_plot(
          table, metric, (fs::path(out_dir) / ("gain_" + metric + ".svg")).string());
    } catch (const Error& e) {
      note("gain plot skipped for " + metric + ": " + e.what());
    }
  }
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.datasets.empty()) fail(ErrorCode::kInvalidArgument, "no datasets configured");

  if (const char* env = std::getenv(kThreadsEnvVar)) {
    const int threads = std::atoi(env);
    if (threads > 0) omp_set_num_threads(threads);
  }

  const double t_start = omp_get_wtime();
  ExperimentOutput output;
  output.record.version = kVersion;
  output.record.started_at = timestamp_utc();

  // Load datasets and build the per-repeat splits up front; unusable
  // datasets are a configuration error, not a skippable cell.
  std::vector<PreparedDataset> prepared(cfg.datasets.size());
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    auto& pd = prepared[d];
    pd.full = data::load_csv(cfg.datasets[d].path, cfg.datasets[d].target);
    pd.name = cfg.datasets[d].name.empty() ? pd.full.name : cfg.datasets[d].name;
    pd.full.name = pd.name;
    pd.original_ratio = data::imbalance_ratio(pd.full).ratio;
    for (int rep = 0; rep < cfg.seed_repeats; ++rep) {
      pd.splits.push_back(data::stratified_split(
          pd.full, cfg.split_fraction,
          cell_seed(cfg.seed, pd.name, "split", 0.0, rep, "split")));
    }
    pd.baseline_auc.assign(static_cast<std::size_t>(cfg.seed_repeats), 0.0);
  }

  // Phase 1: baseline cells (one per dataset, repeats inside).
  const auto n_datasets = static_cast<std::ptrdiff_t>(prepared.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t d = 0; d < n_datasets; ++d) {
    auto& pd = prepared[static_cast<std::size_t>(d)];
    const double t0 = omp_get_wtime();
    CellRecord cell;
    cell.dataset = pd.name;
    cell.method = "original";
    cell.ratio = pd.original_ratio;
    try {
      for (int rep = 0; rep < cfg.seed_repeats; ++rep) {
        const auto& split = pd.splits[static_cast<std::size_t>(rep)];
        auto report = evaluate_cell(cfg, split.train, split.test, pd.name, "original",
                                    pd.original_ratio, rep);
        report.auc_gain = 0.0;
        pd.baseline_auc[static_cast<std::size_t>(rep)] = report.auc_reference;
        cell.reports.push_back(std::move(report));
      }
      cell.status = "ok";
      pd.baseline_ok = true;
    } catch (const std::exception& e) {
      cell.status = "skipped";
      cell.error = e.what();
      cell.reports.clear();
    }
    cell.wall_ms = (omp_get_wtime() - t0) * 1000.0;
    pd.baseline_cell = std::move(cell);
  }

  // Phase 2: one job per (dataset, method, ratio) cell.
  struct Job {
    std::size_t dataset;
    resample::Method method;
    double ratio;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < prepared.size(); ++d) {
    for (const auto method : cfg.methods) {
      for (const double ratio : cfg.ratios) jobs.push_back({d, method, ratio});
    }
  }
  std::vector<CellRecord> cells(jobs.size());

  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t jid = 0; jid < n_jobs; ++jid) {
    const auto& job = jobs[static_cast<std::size_t>(jid)];
    const auto& pd = prepared[job.dataset];
    const std::string method = resample::method_name(job.method);
    const double t0 = omp_get_wtime();

    CellRecord cell;
    cell.dataset = pd.name;
    cell.method = method;
    cell.ratio = job.ratio;
    try {
      if (!pd.baseline_ok) {
        fail(ErrorCode::kInvalidArgument, "baseline cell failed: " + pd.baseline_cell.error);
      }
      for (int rep = 0; rep < cfg.seed_repeats; ++rep) {
        const auto& split = pd.splits[static_cast<std::size_t>(rep)];
        resample::ResampleSpec spec;
        spec.method = job.method;
        spec.target_ratio = job.ratio;
        spec.k_neighbors =
            job.method == resample::Method::kNearMiss ? cfg.nearmiss_k : cfg.smote_k;
        spec.seed = cell_seed(cfg.seed, pd.name, method, job.ratio, rep, "resample");
        const auto balanced = resample::apply(split.train, spec);

        auto report = evaluate_cell(cfg, balanced.dataset, split.test, pd.name, method,
                                    job.ratio, rep);
        report.auc_gain =
            report.auc_reference - pd.baseline_auc[static_cast<std::size_t>(rep)];
        cell.reports.push_back(std::move(report));
      }
      cell.status = "ok";
    } catch (const std::exception& e) {
      cell.status = "skipped";
      cell.error = e.what();
      cell.reports.clear();
    }
    cell.wall_ms = (omp_get_wtime() - t0) * 1000.0;
    cells[static_cast<std::size_t>(jid)] = std::move(cell);
  }

  // Deterministic merge: baseline cells first, then the grid in configured
  // order (the job list is already canonical).
  for (std::size_t d = 0; d < prepared.size(); ++d) {
    output.record.cells.push_back(prepared[d].baseline_cell);
  }
  for (const auto& cell : cells) output.record.cells.push_back(cell);
  for (const auto& cell : output.record.cells) {
    if (cell.status == "skipped") {
      output.record.notes.push_back("skipped cell " + cell.dataset + "/" + cell.method +
                                    "/" + ratio_key(cell.ratio) + ": " + cell.error);
    }
    for (const auto& r : cell.reports) append_rows(output.table, r);
  }
  output.table.sort_rows();

  output.stats = compute_stats(output.table, &output.record.notes);

  fs::create_directories(cfg.output_dir);
  report::write_results_csv(output.table, (fs::path(cfg.output_dir) / "results.csv").string());
  write_stats_csv(output.stats, (fs::path(cfg.output_dir) / "stats.csv").string());
  write_plots(output.table, cfg.output_dir, &output.record.notes);

  output.record.total_wall_ms = (omp_get_wtime() - t_start) * 1000.0;
  {
    std::ofstream out(fs::path(cfg.output_dir) / "run_record.json");
    if (!out) fail(ErrorCode::kIoError, "cannot write run_record.json");
    out << record_to_json(output.record, cfg).dump(2) << '\n';
  }
  return output;
}

// --------------------------------------------------------------------------
// CLI
// --------------------------------------------------------------------------

namespace {

void print_manifest_report(const data::ManifestReport& report) {
  for (const auto& f : report.fields) {
    std::printf("%-16s expected=%-12g actual=%-12g %s\n", f.field.c_str(), f.expected,
                f.actual, f.pass ? "PASS" : "FAIL");
  }
}

int run_inspect(const std::string& csv_path, const std::string& target,
                const std::string& manifest_path, std::string name) {
  auto dataset = data::load_csv(csv_path, target);
  if (!name.empty()) dataset.name = name;
  const auto summary = data::imbalance_ratio(dataset);
  std::printf("dataset: %s\n", dataset.name.c_str());
  std::printf("samples: %zu\n", dataset.n_samples());
  std::printf("variables: %zu\n", dataset.n_features());
  std::printf("majority: %lld\n", summary.majority_count);
  std::printf("minority: %lld\n", summary.minority_count);
  std::printf("imbalance_ratio: %.2f\n", summary.ratio);
  if (dataset.dropped_rows > 0) {
    std::printf("dropped_rows: %lld\n", dataset.dropped_rows);
  }
  if (manifest_path.empty()) return 0;

  const auto entries = data::load_manifest(manifest_path);
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) {
    return e.dataset_name == dataset.name;
  });
  if (it == entries.end()) {
    fail(ErrorCode::kNameMismatch,
         "dataset \"" + dataset.name + "\" not present in manifest " + manifest_path);
  }
  const auto report = data::check_manifest(dataset, *it);
  print_manifest_report(report);
  return report.all_pass ? 0 : 2;
}

int run_balance(const std::string& csv_path, const std::string& target,
                const std::string& method_str, double ratio, int k, std::uint64_t seed,
                const std::string& out_path) {
  const auto dataset = data::load_csv(csv_path, target);
  resample::ResampleSpec spec;
  spec.method = resample::parse_method(method_str);
  spec.target_ratio = ratio;
  spec.seed = seed;
  if (k > 0) {
    spec.k_neighbors = k;
  } else {
    spec.k_neighbors = spec.method == resample::Method::kNearMiss ? 3 : 5;
  }

  const auto before = data::imbalance_ratio(dataset);
  const auto result = resample::apply(dataset, spec);
  const auto after = data::imbalance_ratio(result.dataset);
  data::write_csv(result.dataset, target, out_path);
  std::printf("method: %s\n", resample::method_name(spec.method).c_str());
  std::printf("before: %lld majority / %lld minority (ratio %.4f)\n",
              before.majority_count, before.minority_count, before.ratio);
  std::printf("after: %lld majority / %lld minority (ratio %.4f)\n", after.majority_count,
              after.minority_count, after.ratio);
  std::printf("applied: %s\n", result.applied ? "yes" : "no");
  std::printf("wrote: %s\n", out_path.c_str());
  return 0;
}

int run_pool(const std::string& csv_path, const std::string& target, double split_fraction,
             int budget, std::uint64_t seed, const std::string& out_path,
             const std::string& eval_out) {
  const auto dataset = data::load_csv(csv_path, target);
  const auto split =
      data::stratified_split(dataset, split_fraction, seed_combine(seed, "split"));
  rashomon::HyperparameterSpace space;
  const auto pool = rashomon::build_pool(split.train, split.test, space, budget, seed);
  rashomon::save_pool(pool, out_path);
  if (!eval_out.empty()) data::write_csv(split.test, target, eval_out);

  const int ref = rashomon::reference_model(pool);
  double best = 1.0;
  for (const auto& m : pool.models) best = std::min(best, m.holdout_loss);
  std::printf("pool: %d models\n", pool.budget);
  std::printf("reference_id: %d\n", ref);
  std::printf("reference_loss: %.6f\n", best);
  std::printf("wrote: %s\n", out_path.c_str());
  if (!eval_out.empty()) std::printf("eval partition: %s\n", eval_out.c_str());
  return 0;
}

int run_metrics(const std::string& pool_path, const std::string& eval_path,
                const std::string& target, double epsilon, double threshold, int repeats,
                std::uint64_t seed, const std::string& viod_agg,
                const std::string& out_path) {
  const auto pool = rashomon::load_pool(pool_path);
  const auto eval = data::load_csv(eval_path, target);
  const auto rs = rashomon::rashomon_set(pool, epsilon);
  const auto pm = multiplicity::prediction_matrix(rs, pool, eval.features, threshold);
  const auto aggregation = multiplicity::parse_aggregation(viod_agg);

  json doc = rashomon::rashomon_to_json(pool, rs);
  doc["set_size"] = rashomon::set_size(rs);
  doc["ambiguity"] = multiplicity::ambiguity(pm);
  doc["discrepancy"] = multiplicity::discrepancy(pm);
  doc["viod"] = multiplicity::viod(rs, pool, eval, repeats, seed, aggregation);
  doc["viod_aggregation"] = multiplicity::aggregation_name(aggregation);
  doc["threshold"] = threshold;

  if (out_path.empty()) {
    std::printf("%s\n", doc.dump(2).c_str());
  } else {
    std::ofstream out(out_path);
    if (!out) fail(ErrorCode::kIoError, "cannot open " + out_path + " for writing");
    out << doc.dump(2) << '\n';
    std::printf("wrote: %s\n", out_path.c_str());
  }
  return 0;
}

int run_experiment_command(const std::string& config_path, const std::string& out_override,
                           long long seed_override, int budget_override,
                           int repeats_override, double epsilon_override) {
  std::ifstream in(config_path);
  if (!in) fail(ErrorCode::kFileNotFound, config_path);
  json document;
  try {
    in >> document;
  } catch (const json::exception& e) {
    fail(ErrorCode::kSchemaViolation, config_path + ": " + e.what());
  }
  auto cfg = validate_config(document);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (budget_override > 0) cfg.pool_budget = budget_override;
  if (repeats_override > 0) cfg.seed_repeats = repeats_override;
  if (epsilon_override > 0) cfg.epsilon = epsilon_override;

  const auto output = run_experiment(cfg);
  std::size_t ok = 0;
  std::size_t skipped = 0;
  for (const auto& cell : output.record.cells) {
    if (cell.status == "ok")
      ++ok;
    else
      ++skipped;
  }
  std::printf("cells: %zu ok, %zu skipped\n", ok, skipped);
  std::printf("results: %s/results.csv\n", cfg.output_dir.c_str());
  std::printf("stats: %s/stats.csv\n", cfg.output_dir.c_str());
  std::printf("record: %s/run_record.json\n", cfg.output_dir.c_str());
  return 0;
}

int run_plot(const std::string& results_path, const std::string& out_dir) {
  const auto table = report::read_results_csv(results_path);
  if (table.rows.empty()) fail(ErrorCode::kEmptyTable, results_path + " has no rows");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> notes;
  write_plots(table, out_dir, &notes);
  for (const auto& n : notes) std::fprintf(stderr, "note: %s\n", n.c_str());
  std::printf("plots written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Audits predictive multiplicity of balancing methods on imbalanced "
               "binary classification datasets"};
  app.require_subcommand(1);
  std::function<int()> action;

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Imbalance summary and manifest check");
  {
    auto csv_path = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto manifest = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    inspect->add_option("csv", *csv_path, "Dataset CSV")->required();
    inspect->add_option("--target", *target, "Target column name")->required();
    inspect->add_option("--manifest", *manifest, "Manifest JSON to check against");
    inspect->add_option("--name", *name, "Override the dataset name");
    inspect->callback([=, &action] {
      action = [=] { return run_inspect(*csv_path, *target, *manifest, *name); };
    });
  }

  // balance
  auto* balance = app.add_subcommand("balance", "Apply one balancing method to a CSV");
  {
    auto csv_path = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto method = std::make_shared<std::string>();
    auto ratio = std::make_shared<double>(1.0);
    auto k = std::make_shared<int>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    balance->add_option("csv", *csv_path, "Dataset CSV")->required();
    balance->add_option("--target", *target, "Target column name")->required();
    balance->add_option("--method", *method,
                        "random_oversample | smote | random_undersample | near_miss")
        ->required();
    balance->add_option("--ratio", *ratio, "Target imbalance ratio (default 1.0)");
    balance->add_option("--k", *k, "Neighbor count (default: 5 for smote, 3 for near_miss)");
    balance->add_option("--seed", *seed, "Seed for the stochastic methods");
    balance->add_option("--out", *out, "Output CSV path")->required();
    balance->callback([=, &action] {
      action = [=] {
        return run_balance(*csv_path, *target, *method, *ratio, *k, *seed, *out);
      };
    });
  }

  // pool
  auto* pool = app.add_subcommand("pool", "Train a model pool and serialize it");
  {
    auto csv_path = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto split = std::make_shared<double>(0.7);
    auto budget = std::make_shared<int>(15);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    auto eval_out = std::make_shared<std::string>();
    pool->add_option("csv", *csv_path, "Dataset CSV")->required();
    pool->add_option("--target", *target, "Target column name")->required();
    pool->add_option("--split", *split, "Stratified train fraction (default 0.7)");
    pool->add_option("--budget", *budget, "Number of models (default 15)");
    pool->add_option("--seed", *seed, "Master seed");
    pool->add_option("--out", *out, "Pool JSON path")->required();
    pool->add_option("--eval-out", *eval_out, "Also write the evaluation partition CSV");
    pool->callback([=, &action] {
      action = [=] {
        return run_pool(*csv_path, *target, *split, *budget, *seed, *out, *eval_out);
      };
    });
  }

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Rashomon set and multiplicity metrics");
  {
    auto pool_path = std::make_shared<std::string>();
    auto eval_path = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto epsilon = std::make_shared<double>(0.05);
    auto threshold = std::make_shared<double>(0.5);
    auto repeats = std::make_shared<int>(5);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto viod_agg = std::make_shared<std::string>("min");
    auto out = std::make_shared<std::string>();
    metrics->add_option("--pool", *pool_path, "Pool JSON from `pool`")->required();
    metrics->add_option("--eval", *eval_path, "Evaluation CSV")->required();
    metrics->add_option("--target", *target, "Target column name")->required();
    metrics->add_option("--epsilon", *epsilon, "Rashomon tolerance (default 0.05)");
    metrics->add_option("--threshold", *threshold, "Classification threshold");
    metrics->add_option("--repeats", *repeats, "Permutation importance repeats");
    metrics->add_option("--seed", *seed, "Seed for importance permutations");
    metrics->add_option("--viod", *viod_agg, "VIOD aggregation: min | max");
    metrics->add_option("--out", *out, "Write the report JSON here instead of stdout");
    metrics->callback([=, &action] {
      action = [=] {
        return run_metrics(*pool_path, *eval_path, *target, *epsilon, *threshold, *repeats,
                           *seed, *viod_agg, *out);
      };
    });
  }

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the full audit pipeline");
  {
    auto config_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto seed = std::make_shared<long long>(-1);
    auto budget = std::make_shared<int>(0);
    auto repeats = std::make_shared<int>(0);
    auto epsilon = std::make_shared<double>(0.0);
    experiment->add_option("config", *config_path, "Experiment config JSON")->required();
    experiment->add_option("--out", *out, "Override output_dir");
    experiment->add_option("--seed", *seed, "Override master seed");
    experiment->add_option("--budget", *budget, "Override pool budget");
    experiment->add_option("--repeats", *repeats, "Override seed repeats");
    experiment->add_option("--epsilon", *epsilon, "Override epsilon");
    experiment->callback([=, &action] {
      action = [=] {
        return run_experiment_command(*config_path, *out, *seed, *budget, *repeats,
                                      *epsilon);
      };
    });
  }

  // plot
  auto* plot = app.add_subcommand("plot", "Regenerate figures from a results CSV");
  {
    auto results_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>(".");
    plot->add_option("results", *results_path, "results.csv from `experiment`")->required();
    plot->add_option("--out", *out, "Output directory (default .)");
    plot->callback([=, &action] {
      action = [=] { return run_plot(*results_path, *out); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return 1;
  }

  try {
    return action ? action() : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace rashaudit::harness
