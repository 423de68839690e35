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

// Acceptance suite: one gate per release criterion, each printed as a
// single PASS/FAIL line with its measured numbers. The qualitative trend
// check is reported but never gates the exit code.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rashaudit/common.hpp"
#include "rashaudit/harness.hpp"
#include "rashaudit/kernels.hpp"
#include "rashaudit/multiplicity.hpp"
#include "rashaudit/report.hpp"
#include "rashaudit/resample.hpp"
#include "rashaudit/rng.hpp"
#include "rashaudit/stats.hpp"
#include "test_util.hpp"

using namespace rashaudit;

namespace {

int g_failures = 0;

void report_line(int id, bool pass, const std::string& label, const std::string& detail) {
  std::printf("criterion %d %s — %s (%s)\n", id, pass ? "PASS" : "FAIL", label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void report_soft(int id, const std::string& label, const std::string& detail) {
  std::printf("criterion %d REPORT — %s (%s)\n", id, label.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(RASHAUDIT_CLI_PATH) + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[512];
  while (fgets(buffer, sizeof(buffer), pipe)) result.output += buffer;
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string output_field(const std::string& output, const std::string& key) {
  const auto pos = output.find(key + ": ");
  if (pos == std::string::npos) return "";
  const auto start = pos + key.size() + 2;
  const auto end = output.find('\n', start);
  return output.substr(start, end - start);
}

// ---------------------------------------------------------------------------
// Criterion 1: manifest fidelity through the CLI.
// ---------------------------------------------------------------------------

void criterion_manifest() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = RASHAUDIT_DATA_DIR;

  struct Expected {
    const char* name;
    const char* samples;
    const char* variables;
    const char* ratio;
  };
  const Expected table[] = {
      {"phoneme", "5404", "5", "2.41"},
      {"abalone", "4177", "7", "9.68"},
      {"yeast_me2", "1484", "8", "28.10"},
      {"churn", "5000", "8", "6.07"},
      {"pc1", "1109", "17", "13.40"},
      {"wilt", "4839", "5", "17.54"},
  };

  bool pass = true;
  std::string detail;
  for (const auto& e : table) {
    const auto result = run_cli("inspect " + dir + "/" + e.name + ".csv --target class" +
                                " --manifest " + dir + "/manifest.json");
    const bool ok = result.exit_code == 0 &&
                    output_field(result.output, "samples") == e.samples &&
                    output_field(result.output, "variables") == e.variables &&
                    output_field(result.output, "imbalance_ratio") == e.ratio &&
                    result.output.find("FAIL") == std::string::npos;
    if (!ok) {
      pass = false;
      detail += std::string(e.name) + " mismatch; ";
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 5.0) pass = false;
  report_line(1, pass, "manifest fidelity via `inspect`",
              detail + "6 datasets, " + std::to_string(elapsed).substr(0, 5) + " s < 5 s");
}

// ---------------------------------------------------------------------------
// Criterion 2: ambiguity/discrepancy oracle equivalence.
// ---------------------------------------------------------------------------

void criterion_metric_oracle() {
  const auto t0 = std::chrono::steady_clock::now();

  multiplicity::PredictionMatrix fixture;
  fixture.n_models = 3;
  fixture.n_samples = 5;
  for (int v : {0, 1, 1, 0, 1, 0, 1, 0, 0, 1, 1, 1, 1, 0, 0}) {
    fixture.entries.push_back(static_cast<std::uint8_t>(v));
  }
  bool pass = multiplicity::ambiguity(fixture) == 0.6 &&
              multiplicity::discrepancy(fixture) == 0.4;

  Rng rng(2024);
  std::size_t mismatches = 0;
  for (int round = 0; round < 1000; ++round) {
    const std::size_t n_models = 1 + rng.next_below(50);
    const std::size_t n_samples = 1 + rng.next_below(200);
    multiplicity::PredictionMatrix pm;
    pm.n_models = n_models;
    pm.n_samples = n_samples;
    pm.entries.resize(n_models * n_samples);
    for (auto& v : pm.entries) v = static_cast<std::uint8_t>(rng.next_below(2));

    // Brute-force double loop.
    double ambiguous = 0.0;
    double worst = 0.0;
    if (n_models > 1) {
      for (std::size_t i = 0; i < n_samples; ++i) {
        bool conflict = false;
        for (std::size_t f = 1; f < n_models; ++f) {
          if (pm.row(f)[i] != pm.row(0)[i]) conflict = true;
        }
        ambiguous += conflict ? 1.0 : 0.0;
      }
      ambiguous /= static_cast<double>(n_samples);
      for (std::size_t f = 1; f < n_models; ++f) {
        double c = 0.0;
        for (std::size_t i = 0; i < n_samples; ++i) {
          c += pm.row(f)[i] != pm.row(0)[i] ? 1.0 : 0.0;
        }
        worst = std::max(worst, c / static_cast<double>(n_samples));
      }
    }
    if (multiplicity::ambiguity(pm) != ambiguous || multiplicity::discrepancy(pm) != worst) {
      ++mismatches;
    }
  }
  const double elapsed = seconds_since(t0);
  pass = pass && mismatches == 0 && elapsed < 10.0;
  report_line(2, pass, "metric oracle equivalence",
              "fixture (0.6, 0.4) + 1000 random matrices, " +
                  std::to_string(mismatches) + " mismatches, " +
                  std::to_string(elapsed).substr(0, 5) + " s < 10 s");
}

// ---------------------------------------------------------------------------
// Criterion 3: multiplicity invariants (epsilon sweep + singleton + table).
// ---------------------------------------------------------------------------

void criterion_invariants(const report::ResultsTable& desk_table) {
  bool pass = true;
  std::string detail;

  // Fixed pool on a bundled dataset, epsilon sweep.
  const std::string dir = RASHAUDIT_DATA_DIR;
  const auto dataset = data::load_csv(dir + "/yeast_me2.csv", "class");
  const auto split = data::stratified_split(dataset, 0.7, 99);
  rashomon::HyperparameterSpace space;
  const auto pool = rashomon::build_pool(split.train, split.test, space, 15, 99);

  double prev_amb = -1.0;
  double prev_disc = -1.0;
  int prev_size = 0;
  for (const double eps : {0.01, 0.05, 0.1, 0.5}) {
    const auto rs = rashomon::rashomon_set(pool, eps);
    const auto pm = multiplicity::prediction_matrix(rs, pool, split.test.features, 0.5);
    const double amb = multiplicity::ambiguity(pm);
    const double disc = multiplicity::discrepancy(pm);
    if (amb < prev_amb || disc < prev_disc || rashomon::set_size(rs) < prev_size) {
      pass = false;
      detail += "sweep not monotone; ";
    }
    if (amb < disc || amb < 0 || amb > 1 || disc < 0 || disc > 1) {
      pass = false;
      detail += "range violation in sweep; ";
    }
    prev_amb = amb;
    prev_disc = disc;
    prev_size = rashomon::set_size(rs);
  }

  // Singleton set: (ambiguity, discrepancy, viod) = (0, 0, 1).
  rashomon::ModelPool lone;
  lone.budget = 1;
  lone.models.push_back(pool.models.front());
  lone.models[0].id = 0;
  const auto lone_rs = rashomon::rashomon_set(lone, 1e-9);
  const auto lone_pm = multiplicity::prediction_matrix(lone_rs, lone, split.test.features, 0.5);
  if (multiplicity::ambiguity(lone_pm) != 0.0 || multiplicity::discrepancy(lone_pm) != 0.0 ||
      multiplicity::viod(lone_rs, lone, split.test, 2, 1) != 1.0) {
    pass = false;
    detail += "singleton not (0, 0, 1); ";
  }

  // Every cell of the desk experiment respects ambiguity >= discrepancy and
  // the metric ranges.
  std::map<std::tuple<std::string, std::string, double, std::uint64_t>,
           std::pair<double, double>>
      cells;
  for (const auto& row : desk_table.rows) {
    const auto key = std::make_tuple(row.dataset, row.method, row.ratio, row.seed);
    if (row.metric == "ambiguity") cells[key].first = row.value;
    if (row.metric == "discrepancy") cells[key].second = row.value;
    if ((row.metric == "ambiguity" || row.metric == "discrepancy") &&
        (row.value < 0.0 || row.value > 1.0)) {
      pass = false;
      detail += "metric out of [0,1]; ";
    }
    if (row.metric == "viod" && (row.value < -1.0 || row.value > 1.0)) {
      pass = false;
      detail += "viod out of [-1,1]; ";
    }
  }
  std::size_t violations = 0;
  for (const auto& [key, metrics] : cells) {
    if (metrics.first < metrics.second - 1e-15) ++violations;
  }
  if (violations > 0) {
    pass = false;
    detail += std::to_string(violations) + " ambiguity<discrepancy cells; ";
  }

  report_line(3, pass, "multiplicity invariants",
              detail.empty() ? "epsilon sweep monotone, singleton (0,0,1), " +
                                   std::to_string(cells.size()) + " desk cells clean"
                             : detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: AUC and Kendall tau oracles.
// ---------------------------------------------------------------------------

void criterion_rank_oracles() {
  bool pass = true;
  std::string detail;
  Rng rng(4242);

  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 2 + rng.next_below(198);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.next_below(25)) / 24.0;
      labels[i] = static_cast<int>(rng.next_below(2));
    }
    labels[0] = 0;
    labels[n - 1] = 1;

    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != 0) continue;
        ++pairs;
        wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
      }
    }
    const double brute = wins / static_cast<double>(pairs);
    if (std::abs(learner::auc(scores, labels) - brute) > 1e-12) {
      pass = false;
      detail += "auc mismatch; ";
      break;
    }
  }

  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 2 + rng.next_below(40);
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.next_below(9));
      b[i] = static_cast<double>(rng.next_below(9));
    }
    bool a_tied = true;
    bool b_tied = true;
    for (std::size_t i = 1; i < n; ++i) {
      a_tied = a_tied && a[i] == a[0];
      b_tied = b_tied && b[i] == b[0];
    }
    if (a_tied || b_tied) continue;

    long long c = 0, d = 0, ta = 0, tb = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double da = a[i] - a[j];
        const double db = b[i] - b[j];
        if (da == 0) ++ta;
        if (db == 0) ++tb;
        if (da == 0 || db == 0) continue;
        if ((da > 0) == (db > 0))
          ++c;
        else
          ++d;
      }
    }
    const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double brute = static_cast<double>(c - d) /
                         std::sqrt((n0 - static_cast<double>(ta)) * (n0 - static_cast<double>(tb)));
    if (std::abs(multiplicity::kendall_tau(a, b) - brute) > 1e-12) {
      pass = false;
      detail += "tau mismatch; ";
      break;
    }
  }

  // Tie-free identity and reversal.
  std::vector<double> base(25);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = static_cast<double>(i) * 1.5 + 1;
  std::vector<double> reversed(base.rbegin(), base.rend());
  if (multiplicity::kendall_tau(base, base) != 1.0 ||
      multiplicity::kendall_tau(base, reversed) != -1.0) {
    pass = false;
    detail += "tau identity/reversal; ";
  }

  report_line(4, pass, "AUC and Kendall tau oracles",
              detail.empty() ? "200 + 200 random instances within 1e-12" : detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: statistics fixtures.
// ---------------------------------------------------------------------------

void criterion_stats_fixtures() {
  bool pass = true;
  std::string detail;

  stats::GroupedSamples g;
  g.groups.emplace_back("a", std::vector<double>{1, 2, 3});
  g.groups.emplace_back("b", std::vector<double>{4, 5, 6});
  g.groups.emplace_back("c", std::vector<double>{7, 8, 9});
  const auto kw = stats::kruskal_wallis(g);
  if (std::abs(kw.statistic - 7.2) > 1e-9 || std::abs(kw.p_value - 0.0273) > 1e-4) {
    pass = false;
    detail += "KW off (" + std::to_string(kw.statistic) + ", " +
              std::to_string(kw.p_value) + "); ";
  }

  stats::BlockDesign design;
  design.cells = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto fr = stats::friedman(design);
  if (std::abs(fr.statistic - 6.0) > 1e-9 || std::abs(fr.p_value - 0.0498) > 1e-4) {
    pass = false;
    detail += "Friedman off (" + std::to_string(fr.statistic) + ", " +
              std::to_string(fr.p_value) + "); ";
  }

  const double sf = stats::chi_square_sf(6.8286, 5);
  if (std::abs(sf - 0.2337) > 5e-4) {
    pass = false;
    detail += "chi2 sf off (" + std::to_string(sf) + "); ";
  }

  report_line(5, pass, "statistics fixtures",
              detail.empty() ? "H=7.2 p=0.0273, chi2=6.0 p=0.0498, sf(6.8286,5)=0.2337"
                             : detail);
}

// ---------------------------------------------------------------------------
// Criterion 6: resampling contracts on the full grid.
// ---------------------------------------------------------------------------

void criterion_resampling_contracts() {
  bool pass = true;
  std::string detail;
  const auto d = testutil::make_dataset(400, 80, 5, 606);

  std::vector<double> lo(5, 1e300);
  std::vector<double> hi(5, -1e300);
  for (std::size_t i = 0; i < d.n_samples(); ++i) {
    if (d.labels[i] != 1) continue;
    for (std::size_t j = 0; j < 5; ++j) {
      lo[j] = std::min(lo[j], d.features(i, j));
      hi[j] = std::max(hi[j], d.features(i, j));
    }
  }
  std::multiset<std::string> input_rows;
  auto signature = [](const Matrix& m, std::size_t i) {
    std::string s;
    for (std::size_t j = 0; j < m.cols; ++j) s += std::to_string(m(i, j)) + "|";
    return s;
  };
  for (std::size_t i = 0; i < d.n_samples(); ++i) {
    input_rows.insert(signature(d.features, i));
  }

  const resample::Method methods[] = {
      resample::Method::kRandomOversample, resample::Method::kSmote,
      resample::Method::kRandomUndersample, resample::Method::kNearMiss};
  for (const auto method : methods) {
    for (const double ratio : {1.0, 1.05, 1.10, 1.15, 1.20, 1.25}) {
      resample::ResampleSpec spec;
      spec.method = method;
      spec.target_ratio = ratio;
      spec.seed = 7;
      spec.k_neighbors = method == resample::Method::kNearMiss ? 3 : 5;
      const auto result = resample::apply(d, spec);
      if (!result.applied) {
        pass = false;
        detail += "unexpected no-op; ";
        continue;
      }
      const auto summary = data::imbalance_ratio(result.dataset);
      const double slack =
          1.0 / static_cast<double>(std::min(summary.minority_count, summary.majority_count));
      if (std::abs(summary.ratio - ratio) > slack + 1e-12) {
        pass = false;
        detail += resample::method_name(method) + "@" + std::to_string(ratio) + " ratio; ";
      }
      if (method == resample::Method::kSmote) {
        for (std::size_t i = d.n_samples(); i < result.dataset.n_samples(); ++i) {
          for (std::size_t j = 0; j < 5; ++j) {
            const double v = result.dataset.features(i, j);
            if (v < lo[j] || v > hi[j]) {
              pass = false;
              detail += "smote bbox; ";
            }
          }
        }
      }
      if (method == resample::Method::kRandomUndersample ||
          method == resample::Method::kNearMiss) {
        for (std::size_t i = 0; i < result.dataset.n_samples(); ++i) {
          if (!input_rows.count(signature(result.dataset.features, i))) {
            pass = false;
            detail += "subset violation; ";
            break;
          }
        }
      }
    }
  }
  report_line(6, pass, "resampling contracts",
              detail.empty() ? "4 methods x 6 grid ratios: ratio within one sample, "
                               "bbox and subset checks clean"
                             : detail);
}

// ---------------------------------------------------------------------------
// Criterion 7: end-to-end determinism.
// ---------------------------------------------------------------------------

void criterion_determinism(const testutil::TempDir& tmp) {
  harness::ExperimentConfig cfg;
  cfg.datasets = {{std::string(RASHAUDIT_DATA_DIR) + "/yeast_me2.csv", "class", "yeast_me2"}};
  cfg.methods = {resample::Method::kRandomOversample, resample::Method::kNearMiss};
  cfg.ratios = {1.0, 1.25};
  cfg.pool_budget = 6;
  cfg.seed = 77;
  cfg.seed_repeats = 2;
  cfg.importance_repeats = 2;
  cfg.space.n_trees_min = 5;
  cfg.space.n_trees_max = 20;

  cfg.output_dir = tmp.file("det_a");
  (void)harness::run_experiment(cfg);
  cfg.output_dir = tmp.file("det_b");
  (void)harness::run_experiment(cfg);

  const bool results_equal = testutil::read_file(tmp.file("det_a") + "/results.csv") ==
                             testutil::read_file(tmp.file("det_b") + "/results.csv");
  const bool stats_equal = testutil::read_file(tmp.file("det_a") + "/stats.csv") ==
                           testutil::read_file(tmp.file("det_b") + "/stats.csv");
  report_line(7, results_equal && stats_equal, "end-to-end determinism",
              std::string("results.csv ") + (results_equal ? "identical" : "DIFFER") +
                  ", stats.csv " + (stats_equal ? "identical" : "DIFFER"));
}

// ---------------------------------------------------------------------------
// Criterion 8: desk experiment runtime plus the qualitative trend report.
// ---------------------------------------------------------------------------

struct DeskRun {
  harness::ExperimentOutput output;
  double elapsed_s = 0.0;
  std::string out_dir;
};

DeskRun run_desk_experiment(const testutil::TempDir& tmp) {
  std::fprintf(stderr,
               "running desk experiment: 3 datasets x 4 methods x 6 ratios x 15-model "
               "pools x 5 seeds...\n");
  const std::string dir = RASHAUDIT_DATA_DIR;
  harness::ExperimentConfig cfg;
  cfg.datasets = {{dir + "/pc1.csv", "class", "pc1"},
                  {dir + "/yeast_me2.csv", "class", "yeast_me2"},
                  {dir + "/abalone.csv", "class", "abalone"}};
  cfg.seed = 2024;
  cfg.output_dir = tmp.file("desk");

  DeskRun run;
  run.out_dir = cfg.output_dir;
  const auto t0 = std::chrono::steady_clock::now();
  run.output = harness::run_experiment(cfg);
  run.elapsed_s = seconds_since(t0);
  std::fprintf(stderr, "desk experiment finished in %.1f s\n", run.elapsed_s);
  return run;
}

void criterion_desk_run(const DeskRun& desk) {
  std::size_t skipped = 0;
  for (const auto& cell : desk.output.record.cells) {
    if (cell.status != "ok") ++skipped;
  }
  const bool pass = desk.elapsed_s < 900.0 && skipped == 0 &&
                    desk.output.record.cells.size() == 3 * (1 + 4 * 6);
  report_line(8, pass, "desk experiment scale and runtime",
              std::to_string(desk.output.record.cells.size()) + " cells, " +
                  std::to_string(skipped) + " skipped, " +
                  std::to_string(desk.elapsed_s).substr(0, 6) + " s < 900 s");

  // Trend report: full-balance oversampling/undersampling ambiguity vs the
  // unbalanced baseline, per dataset-seed combination.
  std::map<std::pair<std::string, std::uint64_t>, double> baseline;
  for (const auto& row : desk.output.table.rows) {
    if (row.metric == "ambiguity" && row.method == "original") {
      baseline[{row.dataset, row.seed}] = row.value;
    }
  }
  for (const char* method : {"random_oversample", "random_undersample"}) {
    std::size_t wins = 0;
    std::size_t total = 0;
    for (const auto& row : desk.output.table.rows) {
      if (row.metric != "ambiguity" || row.method != method || row.ratio != 1.0) continue;
      const auto it = baseline.find({row.dataset, row.seed});
      if (it == baseline.end()) continue;
      ++total;
      if (row.value >= it->second) ++wins;
    }
    report_soft(8, std::string("trend: full-balance ") + method +
                       " ambiguity >= baseline",
                std::to_string(wins) + "/" + std::to_string(total) +
                    " dataset-seed combinations" +
                    (2 * wins > total ? " (majority holds)" : " (majority does not hold)"));
  }
}

// ---------------------------------------------------------------------------
// Criterion 9: plot validity.
// ---------------------------------------------------------------------------

void criterion_plots(const DeskRun& desk) {
  bool pass = true;
  std::string detail;

  const char* files[] = {"zone.svg",
                         "distribution_ambiguity.svg",
                         "distribution_discrepancy.svg",
                         "distribution_viod.svg",
                         "gain_ambiguity.svg",
                         "gain_discrepancy.svg",
                         "gain_viod.svg"};
  for (const char* name : files) {
    const auto path = desk.out_dir + "/" + name;
    if (!std::filesystem::exists(path)) {
      pass = false;
      detail += std::string(name) + " missing; ";
      continue;
    }
    std::string why;
    if (!testutil::xml_well_formed(testutil::read_file(path), &why)) {
      pass = false;
      detail += std::string(name) + " malformed (" + why + "); ";
    }
  }

  // Every zone point lies inside its rendered hull, and the zone plot
  // carries one polygon per non-degenerate group (all five here).
  std::size_t points_checked = 0;
  std::size_t polygon_groups = 0;
  for (const auto& zone : report::zone_groups(desk.output.table)) {
    if (zone.hull.size() >= 3) ++polygon_groups;
    for (const auto& pt : zone.points) {
      ++points_checked;
      if (!testutil::inside_hull(zone.hull, pt[0], pt[1])) {
        pass = false;
        detail += "hull containment (" + zone.label + "); ";
      }
    }
  }
  const auto zone_svg = testutil::read_file(desk.out_dir + "/zone.svg");
  if (testutil::count_occurrences(zone_svg, "<polygon") != polygon_groups ||
      polygon_groups != 5) {
    pass = false;
    detail += "zone polygon count " +
              std::to_string(testutil::count_occurrences(zone_svg, "<polygon")) + " vs " +
              std::to_string(polygon_groups) + " groups; ";
  }

  // Gain plot axes as published: [0,1] for ambiguity/discrepancy, [-1,1]
  // for the importance-order metric.
  if (report::metric_value_range("ambiguity") != std::pair<double, double>{0.0, 1.0} ||
      report::metric_value_range("discrepancy") != std::pair<double, double>{0.0, 1.0} ||
      report::metric_value_range("viod") != std::pair<double, double>{-1.0, 1.0}) {
    pass = false;
    detail += "axis ranges; ";
  }
  const auto viod_svg = testutil::read_file(desk.out_dir + "/gain_viod.svg");
  if (viod_svg.find(">-1<") == std::string::npos) {
    pass = false;
    detail += "viod axis tick -1 missing; ";
  }

  report_line(9, pass, "plot validity",
              detail.empty() ? "7 SVGs well-formed, " + std::to_string(points_checked) +
                                   " hull points contained, axis ranges correct"
                             : detail);
}

}  // namespace

int main() {
  std::printf("rashaudit acceptance suite (version %s)\n", kVersion);
  testutil::TempDir tmp;

  try {
    criterion_manifest();
    criterion_metric_oracle();
    const auto desk = run_desk_experiment(tmp);
    criterion_invariants(desk.output.table);
    criterion_rank_oracles();
    criterion_stats_fixtures();
    criterion_resampling_contracts();
    criterion_determinism(tmp);
    criterion_desk_run(desk);
    criterion_plots(desk);
  } catch (const std::exception& e) {
    std::printf("acceptance suite aborted: %s\n", e.what());
    return 1;
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
