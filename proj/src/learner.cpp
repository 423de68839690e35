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

#include "rashaudit/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rashaudit/common.hpp"
#include "rashaudit/rng.hpp"

namespace rashaudit::learner {

std::string family_name(ModelFamily f) {
  return f == ModelFamily::kTree ? "tree" : "forest";
}

ModelFamily parse_family(const std::string& name) {
  if (name == "tree") return ModelFamily::kTree;
  if (name == "forest") return ModelFamily::kForest;
  fail(ErrorCode::kInvalidArgument, "unknown model family \"" + name + "\"");
}

namespace {

// Tree induction over a fixed sample of rows. Sorted per-feature position
// arrays are built once and partitioned stably at every split, so a node's
// split scan is a single linear pass per feature instead of a sort.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<int>& y,
              std::vector<std::uint32_t> sample, const Hyperparameters& hp,
              int features_per_split, Rng& rng)
      : X_(X),
        hp_(hp),
        features_per_split_(features_per_split),
        rng_(rng),
        sample_(std::move(sample)),
        n_(sample_.size()),
        p_(X.cols) {
    labels_.resize(n_);
    for (std::size_t pos = 0; pos < n_; ++pos) labels_[pos] = static_cast<std::uint8_t>(y[sample_[pos]]);

    order_.assign(p_, std::vector<std::int32_t>(n_));
    sorted_values_.assign(p_, std::vector<double>(n_));
    std::vector<std::int32_t> base(n_);
    std::iota(base.begin(), base.end(), 0);
    for (std::size_t f = 0; f < p_; ++f) {
      auto& ord = order_[f];
      ord = base;
      std::sort(ord.begin(), ord.end(), [&](std::int32_t a, std::int32_t b) {
        const double va = X_(sample_[a], f);
        const double vb = X_(sample_[b], f);
        if (va != vb) return va < vb;
        return a < b;
      });
      auto& vals = sorted_values_[f];
      for (std::size_t i = 0; i < n_; ++i) vals[i] = X_(sample_[ord[i]], f);
    }

    goes_left_.resize(n_);
    scratch_order_.resize(n_);
    scratch_values_.resize(n_);
    feature_scratch_.resize(p_);
  }

  Tree build() {
    Tree tree;
    build_node(tree, 0, n_, 0);
    return tree;
  }

 private:
  struct Split {
    double score = std::numeric_limits<double>::infinity();
    int feature = -1;
    double threshold = 0.0;
    std::size_t left_count = 0;
  };

  std::size_t count_ones(std::size_t begin, std::size_t end) const {
    std::size_t ones = 0;
    const auto& ord = order_[0];
    for (std::size_t i = begin; i < end; ++i) ones += labels_[ord[i]];
    return ones;
  }

  // Candidate features for one split, ascending. For full scans this is just
  // 0..p-1; forests draw a uniform subset without replacement.
  std::span<const std::int32_t> pick_features() {
    for (std::size_t f = 0; f < p_; ++f) feature_scratch_[f] = static_cast<std::int32_t>(f);
    if (static_cast<std::size_t>(features_per_split_) >= p_) {
      return {feature_scratch_.data(), p_};
    }
    for (int i = 0; i < features_per_split_; ++i) {
      const auto j = i + static_cast<int>(rng_.next_below(p_ - static_cast<std::size_t>(i)));
      std::swap(feature_scratch_[i], feature_scratch_[j]);
    }
    std::sort(feature_scratch_.begin(), feature_scratch_.begin() + features_per_split_);
    return {feature_scratch_.data(), static_cast<std::size_t>(features_per_split_)};
  }

  Split find_split(std::size_t begin, std::size_t end, std::size_t total_ones) {
    const std::size_t total = end - begin;
    const auto min_leaf = static_cast<std::size_t>(hp_.min_samples_leaf);
    Split best;
    for (const std::int32_t f : pick_features()) {
      const auto& ord = order_[f];
      const auto& vals = sorted_values_[f];
      std::size_t left_ones = 0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        left_ones += labels_[ord[i]];
        const std::size_t left_n = i - begin + 1;
        const std::size_t right_n = total - left_n;
        if (right_n < min_leaf) break;
        if (left_n < min_leaf) continue;
        if (vals[i] == vals[i + 1]) continue;
        const double threshold = vals[i] + 0.5 * (vals[i + 1] - vals[i]);
        // Adjacent representable values can produce a midpoint equal to one
        // endpoint; such a split cannot be replayed at prediction time.
        if (!(vals[i] < threshold && threshold < vals[i + 1])) continue;
        const double l1 = static_cast<double>(left_ones);
        const double l0 = static_cast<double>(left_n) - l1;
        const double r1 = static_cast<double>(total_ones) - l1;
        const double r0 = static_cast<double>(right_n) - r1;
        // Weighted Gini impurity of the children, up to a constant factor.
        const double score = l1 * l0 / static_cast<double>(left_n) +
                             r1 * r0 / static_cast<double>(right_n);
        if (score < best.score) {
          best.score = score;
          best.feature = f;
          best.threshold = threshold;
          best.left_count = left_n;
        }
      }
    }
    return best;
  }

  void partition(std::size_t begin, std::size_t end, const Split& split) {
    const auto& split_ord = order_[split.feature];
    for (std::size_t i = begin; i < end; ++i) {
      goes_left_[split_ord[i]] = i - begin < split.left_count ? 1 : 0;
    }
    for (std::size_t f = 0; f < p_; ++f) {
      auto& ord = order_[f];
      auto& vals = sorted_values_[f];
      std::size_t out_left = 0;
      std::size_t out_right = split.left_count;
      for (std::size_t i = begin; i < end; ++i) {
        const std::int32_t pos = ord[i];
        const std::size_t slot = goes_left_[pos] ? out_left++ : out_right++;
        scratch_order_[slot] = pos;
        scratch_values_[slot] = vals[i];
      }
      std::copy(scratch_order_.begin(), scratch_order_.begin() + static_cast<std::ptrdiff_t>(end - begin),
                ord.begin() + static_cast<std::ptrdiff_t>(begin));
      std::copy(scratch_values_.begin(), scratch_values_.begin() + static_cast<std::ptrdiff_t>(end - begin),
                vals.begin() + static_cast<std::ptrdiff_t>(begin));
    }
  }

  int build_node(Tree& tree, std::size_t begin, std::size_t end, int depth) {
    const std::size_t total = end - begin;
    const std::size_t ones = count_ones(begin, end);
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    const bool pure = ones == 0 || ones == total;
    const bool depth_stop = depth >= hp_.max_depth;
    const bool size_stop = total < 2 * static_cast<std::size_t>(hp_.min_samples_leaf);

    Split split;
    if (!pure && !depth_stop && !size_stop) split = find_split(begin, end, ones);

    if (split.feature < 0) {
      tree.nodes[idx].leaf_fraction =
          static_cast<double>(ones) / static_cast<double>(total);
      return idx;
    }

    partition(begin, end, split);
    tree.nodes[idx].feature = split.feature;
    tree.nodes[idx].threshold = split.threshold;
    const int left = build_node(tree, begin, begin + split.left_count, depth + 1);
    const int right = build_node(tree, begin + split.left_count, end, depth + 1);
    tree.nodes[idx].left = left;
    tree.nodes[idx].right = right;
    return idx;
  }

  const Matrix& X_;
  const Hyperparameters& hp_;
  int features_per_split_;
  Rng& rng_;
  std::vector<std::uint32_t> sample_;
  std::size_t n_;
  std::size_t p_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::vector<std::int32_t>> order_;
  std::vector<std::vector<double>> sorted_values_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::int32_t> scratch_order_;
  std::vector<double> scratch_values_;
  std::vector<std::int32_t> feature_scratch_;
};

void validate_hyperparameters(const Hyperparameters& hp, std::size_t p) {
  if (hp.max_depth < 1) fail(ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  if (hp.min_samples_leaf < 1) {
    fail(ErrorCode::kInvalidArgument, "min_samples_leaf must be >= 1");
  }
  if (hp.family == ModelFamily::kForest) {
    if (hp.n_trees < 1) fail(ErrorCode::kInvalidArgument, "n_trees must be >= 1");
    if (!(hp.feature_fraction > 0.0 && hp.feature_fraction <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "feature_fraction must lie in (0, 1]");
    }
  }
  if (p < 1) fail(ErrorCode::kInvalidArgument, "no features");
}

}  // namespace

TrainedModel fit(const data::Dataset& train, const Hyperparameters& hp) {
  const std::size_t n = train.n_samples();
  const std::size_t p = train.n_features();
  if (n == 0) fail(ErrorCode::kDegenerateData, "cannot fit on an empty dataset");
  validate_hyperparameters(hp, p);

  TrainedModel model;
  model.hp = hp;
  model.n_features = p;

  std::vector<std::uint32_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);

  if (hp.family == ModelFamily::kTree) {
    Rng rng(seed_combine(hp.bootstrap_seed, "tree"));
    TreeBuilder builder(train.features, train.labels, identity, hp,
                        static_cast<int>(p), rng);
    model.trees.push_back(builder.build());
  } else {
    const int m = std::clamp(
        static_cast<int>(std::ceil(hp.feature_fraction * static_cast<double>(p))), 1,
        static_cast<int>(p));
    model.trees.reserve(static_cast<std::size_t>(hp.n_trees));
    for (int t = 0; t < hp.n_trees; ++t) {
      Rng rng(seed_combine(seed_combine(hp.bootstrap_seed, "forest_tree"),
                           static_cast<std::uint64_t>(t)));
      std::vector<std::uint32_t> sample;
      if (hp.bootstrap) {
        sample.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          sample[i] = static_cast<std::uint32_t>(rng.next_below(n));
        }
      } else {
        sample = identity;
      }
      TreeBuilder builder(train.features, train.labels, std::move(sample), hp, m, rng);
      model.trees.push_back(builder.build());
    }
  }

  bool mixed = false;
  for (std::size_t i = 1; i < n; ++i) {
    if (train.labels[i] != train.labels[0]) {
      mixed = true;
      break;
    }
  }
  bool all_single_leaf = true;
  for (const auto& tree : model.trees) {
    if (tree.nodes.size() > 1) {
      all_single_leaf = false;
      break;
    }
  }
  model.degenerate = mixed && all_single_leaf;
  return model;
}

namespace {

void check_width(const TrainedModel& m, std::size_t cols) {
  if (cols != m.n_features) {
    fail(ErrorCode::kDimensionMismatch,
         "model expects " + std::to_string(m.n_features) + " features, got " +
             std::to_string(cols));
  }
}

}  // namespace

std::vector<double> predict_proba(const TrainedModel& m, const Matrix& X) {
  check_width(m, X.cols);
  std::vector<double> out(X.rows, 0.0);
  const double inv = 1.0 / static_cast<double>(m.trees.size());
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* row = X.row(i);
    double sum = 0.0;
    for (const auto& tree : m.trees) sum += tree.predict_row(row);
    out[i] = sum * inv;
  }
  return out;
}

std::vector<double> predict_proba_substituted(const TrainedModel& m, const Matrix& X,
                                              std::size_t feature,
                                              std::span<const double> substitute) {
  check_width(m, X.cols);
  if (feature >= X.cols) fail(ErrorCode::kDimensionMismatch, "feature index out of range");
  if (substitute.size() != X.rows) {
    fail(ErrorCode::kDimensionMismatch, "substitute column length mismatch");
  }
  std::vector<double> out(X.rows, 0.0);
  const double inv = 1.0 / static_cast<double>(m.trees.size());
  const auto fcol = static_cast<int>(feature);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* row = X.row(i);
    const double sub = substitute[i];
    double sum = 0.0;
    for (const auto& tree : m.trees) {
      int idx = 0;
      while (!tree.nodes[idx].is_leaf()) {
        const auto& node = tree.nodes[idx];
        const double value = node.feature == fcol ? sub : row[node.feature];
        idx = value < node.threshold ? node.left : node.right;
      }
      sum += tree.nodes[idx].leaf_fraction;
    }
    out[i] = sum * inv;
  }
  return out;
}

std::vector<int> predict_class(const TrainedModel& m, const Matrix& X, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "threshold must lie in (0, 1)");
  }
  const auto proba = predict_proba(m, X);
  std::vector<int> out(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= threshold ? 1 : 0;
  return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::kLengthMismatch, "scores and labels differ in length");
  }
  std::size_t n_pos = 0;
  for (int label : labels) n_pos += static_cast<std::size_t>(label == 1);
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    fail(ErrorCode::kSingleClass, "AUC needs both classes present");
  }

  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] < scores[b];
  });

  // Midranks over runs of equal scores; rank sums up to n^2 stay exact in
  // doubles, so the result matches brute-force pair counting bit for bit.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double loss(const TrainedModel& m, const data::Dataset& d) {
  const auto proba = predict_proba(m, d.features);
  return 1.0 - auc(proba, d.labels);
}

namespace {

nlohmann::json node_to_json(const Tree& tree, int idx) {
  const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) return {{"leaf_fraction", node.leaf_fraction}};
  return {{"feature", node.feature},
          {"threshold", node.threshold},
          {"left", node_to_json(tree, node.left)},
          {"right", node_to_json(tree, node.right)}};
}

int node_from_json(const nlohmann::json& j, Tree& tree) {
  const int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf_fraction")) {
    tree.nodes[static_cast<std::size_t>(idx)].leaf_fraction =
        j.at("leaf_fraction").get<double>();
    return idx;
  }
  tree.nodes[static_cast<std::size_t>(idx)].feature = j.at("feature").get<int>();
  tree.nodes[static_cast<std::size_t>(idx)].threshold = j.at("threshold").get<double>();
  const int left = node_from_json(j.at("left"), tree);
  const int right = node_from_json(j.at("right"), tree);
  tree.nodes[static_cast<std::size_t>(idx)].left = left;
  tree.nodes[static_cast<std::size_t>(idx)].right = right;
  return idx;
}

}  // namespace

nlohmann::json hyperparameters_to_json(const Hyperparameters& hp) {
  return {{"family", family_name(hp.family)},
          {"max_depth", hp.max_depth},
          {"min_samples_leaf", hp.min_samples_leaf},
          {"n_trees", hp.n_trees},
          {"feature_fraction", hp.feature_fraction},
          {"bootstrap", hp.bootstrap},
          {"bootstrap_seed", hp.bootstrap_seed}};
}

Hyperparameters hyperparameters_from_json(const nlohmann::json& j) {
  Hyperparameters hp;
  hp.family = parse_family(j.at("family").get<std::string>());
  hp.max_depth = j.at("max_depth").get<int>();
  hp.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  hp.n_trees = j.at("n_trees").get<int>();
  hp.feature_fraction = j.at("feature_fraction").get<double>();
  hp.bootstrap = j.at("bootstrap").get<bool>();
  hp.bootstrap_seed = j.at("bootstrap_seed").get<std::uint64_t>();
  return hp;
}

nlohmann::json model_to_json(const TrainedModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : m.trees) trees.push_back(node_to_json(tree, 0));
  return {{"id", m.id},
          {"hyperparameters", hyperparameters_to_json(m.hp)},
          {"holdout_loss", m.holdout_loss},
          {"degenerate", m.degenerate},
          {"n_features", m.n_features},
          {"trees", std::move(trees)}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
  TrainedModel m;
  m.id = j.at("id").get<int>();
  m.hp = hyperparameters_from_json(j.at("hyperparameters"));
  m.holdout_loss = j.at("holdout_loss").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  m.n_features = j.at("n_features").get<std::size_t>();
  for (const auto& tree_json : j.at("trees")) {
    Tree tree;
    node_from_json(tree_json, tree);
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace rashaudit::learner
