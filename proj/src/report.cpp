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

#include "rashaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <tuple>

#include "rashaudit/common.hpp"
#include "rashaudit/csv.hpp"
#include "rashaudit/rng.hpp"
#include "rashaudit/svg.hpp"

namespace rashaudit::report {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 600;
constexpr double kMarginLeft = 80;
constexpr double kMarginRight = 170;
constexpr double kMarginTop = 60;
constexpr double kMarginBottom = 70;

constexpr const char* kPalette[] = {
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
    "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

// Canonical presentation order: baseline first, then the balancing methods.
int method_rank(const std::string& method) {
  if (method == "original") return 0;
  if (method == "random_oversample") return 1;
  if (method == "smote") return 2;
  if (method == "random_undersample") return 3;
  if (method == "near_miss") return 4;
  return 5;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double parse_real(const std::string& field, const std::string& origin) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + field.size() || field.empty()) {
    fail(ErrorCode::kMalformedCsv, origin + ": bad numeric field \"" + field + "\"");
  }
  return value;
}

// Linear map from a data interval to a pixel interval.
struct AxisScale {
  double data_lo = 0.0;
  double data_hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;

  double operator()(double v) const {
    return px_lo + (v - data_lo) / (data_hi - data_lo) * (px_hi - px_lo);
  }
};

void draw_frame(svg::Document& doc) {
  doc.rect(0, 0, kWidth, kHeight, "fill:white");
  doc.rect(kMarginLeft, kMarginTop, kWidth - kMarginLeft - kMarginRight,
           kHeight - kMarginTop - kMarginBottom, "fill:none;stroke:#333333;stroke-width:1");
}

void draw_x_axis(svg::Document& doc, const AxisScale& x, const std::vector<double>& ticks,
                 const std::string& label) {
  const double y0 = kHeight - kMarginBottom;
  for (double t : ticks) {
    const double px = x(t);
    doc.line(px, y0, px, y0 + 5, "stroke:#333333;stroke-width:1");
    doc.text(px - 12, y0 + 20, format_short(t), "font-size:12px;fill:#333333");
  }
  doc.text((kMarginLeft + kWidth - kMarginRight) / 2 - 30, y0 + 45, label,
           "font-size:14px;fill:#111111");
}

void draw_y_axis(svg::Document& doc, const AxisScale& y, const std::vector<double>& ticks,
                 const std::string& label) {
  for (double t : ticks) {
    const double py = y(t);
    doc.line(kMarginLeft - 5, py, kMarginLeft, py, "stroke:#333333;stroke-width:1");
    doc.text(kMarginLeft - 45, py + 4, format_short(t), "font-size:12px;fill:#333333");
  }
  doc.text(18, (kMarginTop + kHeight - kMarginBottom) / 2, label,
           "font-size:14px;fill:#111111");
}

void draw_legend(svg::Document& doc, const std::vector<std::string>& labels) {
  const double x0 = kWidth - kMarginRight + 15;
  double y0 = kMarginTop + 10;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    doc.rect(x0, y0 - 9, 12, 12, std::string("fill:") + color + ";fill-opacity:0.6");
    doc.text(x0 + 18, y0 + 1, labels[i], "font-size:12px;fill:#111111");
    y0 += 20;
  }
}

void write_document(const svg::Document& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << doc.render();
  if (!out) fail(ErrorCode::kIoError, "write failed: " + path);
}

std::vector<double> even_ticks(double lo, double hi, int count) {
  std::vector<double> ticks;
  for (int i = 0; i < count; ++i) {
    ticks.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return ticks;
}

}  // namespace

void ResultsTable::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.dataset, a.method, a.ratio, a.seed, a.metric) <
           std::tie(b.dataset, b.method, b.ratio, b.seed, b.metric);
  });
}

void write_results_csv(const ResultsTable& table, const std::string& path) {
  ResultsTable sorted = table;
  sorted.sort_rows();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << "dataset,method,ratio,seed,metric,value,auc_reference,auc_gain\n";
  for (const auto& r : sorted.rows) {
    out << r.dataset << ',' << r.method << ',' << format_real(r.ratio) << ',' << r.seed
        << ',' << r.metric << ',' << format_real(r.value) << ','
        << format_real(r.auc_reference) << ',' << format_real(r.auc_gain) << '\n';
  }
  if (!out) fail(ErrorCode::kIoError, "write failed: " + path);
}

ResultsTable read_results_csv(const std::string& path) {
  const auto records = csv::parse_file(path);
  if (records.empty()) fail(ErrorCode::kMalformedCsv, path + ": missing header");
  const std::vector<std::string> expected = {"dataset", "method",       "ratio",
                                             "seed",    "metric",       "value",
                                             "auc_reference", "auc_gain"};
  if (records[0] != expected) fail(ErrorCode::kMalformedCsv, path + ": unexpected header");

  ResultsTable table;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != expected.size()) {
      fail(ErrorCode::kMalformedCsv, path + ": row " + std::to_string(i + 1));
    }
    ResultRow row;
    row.dataset = rec[0];
    row.method = rec[1];
    row.ratio = parse_real(rec[2], path);
    row.seed = static_cast<std::uint64_t>(std::strtoull(rec[3].c_str(), nullptr, 10));
    row.metric = rec[4];
    row.value = parse_real(rec[5], path);
    row.auc_reference = parse_real(rec[6], path);
    row.auc_gain = parse_real(rec[7], path);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;

  auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                  const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };

  std::vector<std::array<double, 2>> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

namespace {

// Pivots the long-format table into per-method (x_metric, y_metric) points.
std::vector<ZoneSpec> pivot_groups(const ResultsTable& table, const std::string& x_metric,
                                   const std::string& y_metric) {
  ResultsTable sorted = table;
  sorted.sort_rows();

  using CellKey = std::tuple<std::string, std::string, double, std::uint64_t>;
  std::map<CellKey, std::pair<double, double>> cells;
  std::map<CellKey, int> seen;
  for (const auto& r : sorted.rows) {
    CellKey key{r.dataset, r.method, r.ratio, r.seed};
    if (r.metric == x_metric) {
      cells[key].first = r.value;
      seen[key] |= 1;
    } else if (r.metric == y_metric) {
      cells[key].second = r.value;
      seen[key] |= 2;
    }
  }

  std::vector<std::string> methods;
  for (const auto& [key, mask] : seen) {
    if (mask != 3) continue;
    const auto& method = std::get<1>(key);
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
      methods.push_back(method);
    }
  }
  std::sort(methods.begin(), methods.end(), [](const std::string& a, const std::string& b) {
    if (method_rank(a) != method_rank(b)) return method_rank(a) < method_rank(b);
    return a < b;
  });

  std::vector<ZoneSpec> zones;
  for (const auto& method : methods) {
    ZoneSpec zone;
    zone.label = method;
    for (const auto& [key, mask] : seen) {
      if (mask != 3 || std::get<1>(key) != method) continue;
      const auto& value = cells[key];
      zone.points.push_back({value.first, value.second});
    }
    zone.hull = convex_hull(zone.points);
    zones.push_back(std::move(zone));
  }
  return zones;
}

void draw_zones(svg::Document& doc, const std::vector<ZoneSpec>& zones,
                const AxisScale& x, const AxisScale& y) {
  for (std::size_t g = 0; g < zones.size(); ++g) {
    const char* color = kPalette[g % kPaletteSize];
    const auto& zone = zones[g];
    if (zone.hull.size() >= 3) {
      std::vector<std::array<double, 2>> px;
      px.reserve(zone.hull.size());
      for (const auto& pt : zone.hull) px.push_back({x(pt[0]), y(pt[1])});
      doc.polygon(px, std::string("fill:") + color +
                          ";fill-opacity:0.4;stroke:" + color + ";stroke-width:1");
    }
    for (const auto& pt : zone.points) {
      doc.circle(x(pt[0]), y(pt[1]), 3.0, std::string("fill:") + color);
    }
  }
}

}  // namespace

std::vector<ZoneSpec> zone_groups(const ResultsTable& table) {
  return pivot_groups(table, "discrepancy", "ambiguity");
}

void zone_plot(const ResultsTable& table, const std::string& out_path) {
  const auto zones = zone_groups(table);
  bool any_points = false;
  for (const auto& z : zones) any_points = any_points || !z.points.empty();
  if (!any_points) {
    fail(ErrorCode::kEmptyTable, "no (discrepancy, ambiguity) pairs to plot");
  }

  svg::Document doc(kWidth, kHeight);
  draw_frame(doc);
  const AxisScale x{0.0, 1.0, kMarginLeft, kWidth - kMarginRight};
  const AxisScale y{0.0, 1.0, kHeight - kMarginBottom, kMarginTop};
  draw_x_axis(doc, x, even_ticks(0, 1, 5), "discrepancy");
  draw_y_axis(doc, y, even_ticks(0, 1, 5), "ambiguity");
  doc.text(kMarginLeft, kMarginTop - 20, "Rashomon zones per balancing method",
           "font-size:16px;fill:#111111");

  draw_zones(doc, zones, x, y);

  std::vector<std::string> labels;
  for (const auto& z : zones) labels.push_back(z.label);
  draw_legend(doc, labels);
  write_document(doc, out_path);
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted[0];
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

void distribution_plot(const stats::GroupedSamples& g, const PairwiseTests& tests,
                       const std::string& title, const std::string& out_path) {
  if (g.groups.size() < 2) {
    fail(ErrorCode::kEmptyTable, "distribution plot needs at least 2 groups");
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [label, values] : g.groups) {
    if (values.empty()) fail(ErrorCode::kEmptyTable, "group \"" + label + "\" is empty");
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.08 * (hi - lo);
  lo -= pad;
  hi += pad;

  // Reserve headroom for significance bars.
  std::size_t n_bars = 0;
  for (std::size_t i = 0; i < tests.adjusted_p.size(); ++i) {
    for (std::size_t j = i + 1; j < tests.adjusted_p[i].size(); ++j) {
      if (tests.adjusted_p[i][j] < 0.05) ++n_bars;
    }
  }

  svg::Document doc(kWidth, kHeight);
  draw_frame(doc);
  const double bar_space = static_cast<double>(n_bars) * 24.0;
  const AxisScale y{lo, hi, kHeight - kMarginBottom, kMarginTop + bar_space + 20};
  draw_y_axis(doc, y, even_ticks(lo, hi, 5), "value");

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const std::size_t k = g.groups.size();
  const double slot = plot_w / static_cast<double>(k);
  std::vector<double> centers(k);

  for (std::size_t gi = 0; gi < k; ++gi) {
    const auto& [label, values] = g.groups[gi];
    const char* color = kPalette[gi % kPaletteSize];
    const double cx = kMarginLeft + slot * (static_cast<double>(gi) + 0.5);
    centers[gi] = cx;
    const double half = std::min(34.0, slot * 0.3);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_sorted(sorted, 0.25);
    const double q2 = quantile_sorted(sorted, 0.50);
    const double q3 = quantile_sorted(sorted, 0.75);
    const double iqr = q3 - q1;
    double whisker_lo = sorted.front();
    double whisker_hi = sorted.back();
    for (double v : sorted) {
      if (v >= q1 - 1.5 * iqr) {
        whisker_lo = v;
        break;
      }
    }
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
      if (*it <= q3 + 1.5 * iqr) {
        whisker_hi = *it;
        break;
      }
    }

    doc.line(cx, y(whisker_lo), cx, y(q1), "stroke:#555555;stroke-width:1");
    doc.line(cx, y(q3), cx, y(whisker_hi), "stroke:#555555;stroke-width:1");
    doc.line(cx - half * 0.5, y(whisker_lo), cx + half * 0.5, y(whisker_lo),
             "stroke:#555555;stroke-width:1");
    doc.line(cx - half * 0.5, y(whisker_hi), cx + half * 0.5, y(whisker_hi),
             "stroke:#555555;stroke-width:1");
    doc.rect(cx - half, y(q3), 2 * half, y(q1) - y(q3),
             std::string("fill:") + color + ";fill-opacity:0.4;stroke:" + color);
    doc.line(cx - half, y(q2), cx + half, y(q2),
             std::string("stroke:") + color + ";stroke-width:2");

    // Deterministic jitter keeps reruns byte-identical.
    for (std::size_t i = 0; i < values.size(); ++i) {
      Rng rng(seed_combine(hash_text(label), static_cast<std::uint64_t>(i)));
      const double dx = (rng.next_unit() - 0.5) * half * 1.4;
      doc.circle(cx + dx, y(values[i]), 2.0,
                 std::string("fill:") + color + ";fill-opacity:0.8");
    }

    doc.text(cx - half, kHeight - kMarginBottom + 20, label,
             "font-size:11px;fill:#111111");
  }

  const std::string annotation =
      tests.omnibus.method_name + ": statistic = " + format_short(tests.omnibus.statistic) +
      ", df = " + std::to_string(tests.omnibus.df) +
      ", p = " + format_short(tests.omnibus.p_value);
  doc.text(kMarginLeft, kMarginTop - 20, title + "  [" + annotation + "]",
           "font-size:14px;fill:#111111");

  // Significance bars for adjusted p < 0.05, stacked above the columns.
  double bar_y = kMarginTop + 14;
  for (std::size_t i = 0; i < tests.adjusted_p.size(); ++i) {
    for (std::size_t j = i + 1; j < tests.adjusted_p[i].size(); ++j) {
      if (tests.adjusted_p[i][j] >= 0.05) continue;
      if (i >= centers.size() || j >= centers.size()) continue;
      doc.line(centers[i], bar_y, centers[j], bar_y, "stroke:#111111;stroke-width:1");
      doc.line(centers[i], bar_y, centers[i], bar_y + 6, "stroke:#111111;stroke-width:1");
      doc.line(centers[j], bar_y, centers[j], bar_y + 6, "stroke:#111111;stroke-width:1");
      doc.text((centers[i] + centers[j]) / 2 - 20, bar_y - 4,
               "p = " + format_short(tests.adjusted_p[i][j]),
               "font-size:10px;fill:#111111");
      bar_y += 24;
    }
  }

  write_document(doc, out_path);
}

std::pair<double, double> metric_value_range(const std::string& metric) {
  if (metric == "ambiguity" || metric == "discrepancy") return {0.0, 1.0};
  if (metric == "viod") return {-1.0, 1.0};
  fail(ErrorCode::kUnknownMetric, "no plottable range for metric \"" + metric + "\"");
}

void performance_gain_plot(const ResultsTable& table, const std::string& metric,
                           const std::string& out_path) {
  const auto [y_lo, y_hi] = metric_value_range(metric);

  ResultsTable sorted = table;
  sorted.sort_rows();
  struct Group {
    std::string label;
    std::vector<std::array<double, 2>> points;
  };
  std::vector<Group> groups;
  double gain_lo = 0.0;
  double gain_hi = 0.0;
  for (const auto& r : sorted.rows) {
    if (r.metric != metric) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.label == r.method; });
    if (it == groups.end()) {
      groups.push_back({r.method, {}});
      it = groups.end() - 1;
    }
    it->points.push_back({r.auc_gain, r.value});
    gain_lo = std::min(gain_lo, r.auc_gain);
    gain_hi = std::max(gain_hi, r.auc_gain);
  }
  if (groups.empty()) {
    fail(ErrorCode::kEmptyTable, "no rows with metric \"" + metric + "\"");
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (method_rank(a.label) != method_rank(b.label)) {
      return method_rank(a.label) < method_rank(b.label);
    }
    return a.label < b.label;
  });

  if (gain_hi - gain_lo < 1e-9) {
    gain_lo -= 0.05;
    gain_hi += 0.05;
  } else {
    const double pad = 0.08 * (gain_hi - gain_lo);
    gain_lo -= pad;
    gain_hi += pad;
  }

  svg::Document doc(kWidth, kHeight);
  draw_frame(doc);
  const AxisScale x{gain_lo, gain_hi, kMarginLeft, kWidth - kMarginRight};
  const AxisScale y{y_lo, y_hi, kHeight - kMarginBottom, kMarginTop};
  draw_x_axis(doc, x, even_ticks(gain_lo, gain_hi, 5), "AUC gain");
  draw_y_axis(doc, y, even_ticks(y_lo, y_hi, 5), metric);
  doc.text(kMarginLeft, kMarginTop - 20, "Performance gain vs " + metric,
           "font-size:16px;fill:#111111");

  // Zero-gain gridline.
  doc.line(x(0.0), kMarginTop, x(0.0), kHeight - kMarginBottom,
           "stroke:#999999;stroke-width:1;stroke-dasharray:4 3");

  std::vector<ZoneSpec> zones;
  for (auto& group : groups) {
    ZoneSpec zone;
    zone.label = group.label;
    zone.points = std::move(group.points);
    zone.hull = convex_hull(zone.points);
    zones.push_back(std::move(zone));
  }
  draw_zones(doc, zones, x, y);

  std::vector<std::string> labels;
  for (const auto& z : zones) labels.push_back(z.label);
  draw_legend(doc, labels);
  write_document(doc, out_path);
}

}  // namespace rashaudit::report
