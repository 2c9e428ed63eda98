#pragma once

// Binary random forest with Gini splits: per tree a bootstrap sample, per
// node a random sqrt(F) feature subset, thresholds at midpoints between
// consecutive distinct values. Prediction is majority vote over trees; every
// tie, in a leaf or in the vote, resolves to class 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "truewalks/rng.hpp"

namespace truewalks {

struct RfHyper {
  std::size_t n_estimators = 100;
  int max_depth = 0;  // <= 0 means unbounded
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  std::array<std::size_t, 2> counts{0, 0};  // class counts of the node's sample
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(const std::vector<double>& row) const {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
      at = row[static_cast<std::size_t>(nodes[at].feature)] <= nodes[at].threshold
               ? nodes[at].left
               : nodes[at].right;
    }
    const auto& c = nodes[at].counts;
    return c[1] > c[0] ? 1 : 0;
  }
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  RfHyper hyper;
  bool single_class = false;
  int constant_label = 0;
  std::vector<std::string> warnings;
};

namespace detail {

struct TreeBuilder {
  const std::vector<std::vector<double>>& rows;
  const std::vector<int>& labels;
  const RfHyper& hyper;
  Rng& rng;
  DecisionTree& tree;
  std::size_t n_features;
  std::size_t subset_size;

  static double gini(const std::array<std::size_t, 2>& c) {
    const double n = static_cast<double>(c[0] + c[1]);
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(c[0]) / n;
    const double p1 = static_cast<double>(c[1]) / n;
    return 1.0 - p0 * p0 - p1 * p1;
  }

  // Partial Fisher-Yates: the first subset_size entries of a fresh feature
  // index array, drawn deterministically from the forest's stream.
  std::vector<std::size_t> draw_features() {
    std::vector<std::size_t> all(n_features);
    for (std::size_t i = 0; i < n_features; ++i) all[i] = i;
    for (std::size_t i = 0; i < subset_size; ++i) {
      const std::size_t j = i + rng.below(n_features - i);
      std::swap(all[i], all[j]);
    }
    all.resize(subset_size);
    return all;
  }

  std::size_t build(std::vector<std::size_t>&& members, int depth) {
    std::array<std::size_t, 2> counts{0, 0};
    for (auto i : members) ++counts[static_cast<std::size_t>(labels[i])];

    const std::size_t at = tree.nodes.size();
    tree.nodes.push_back({});
    tree.nodes[at].counts = counts;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool too_small = members.size() < hyper.min_samples_split;
    const bool too_deep = hyper.max_depth > 0 && depth >= hyper.max_depth;
    if (pure || too_small || too_deep) return at;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = 2.0;  // any real split scores <= 1
    std::vector<double> values;
    for (auto f : draw_features()) {
      values.clear();
      for (auto i : members) values.push_back(rows[i][f]);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t v = 0; v + 1 < values.size(); ++v) {
        const double thr = (values[v] + values[v + 1]) / 2.0;
        std::array<std::size_t, 2> lc{0, 0}, rc{0, 0};
        for (auto i : members) {
          auto& c = rows[i][f] <= thr ? lc : rc;
          ++c[static_cast<std::size_t>(labels[i])];
        }
        const std::size_t nl = lc[0] + lc[1], nr = rc[0] + rc[1];
        if (nl < hyper.min_samples_leaf || nr < hyper.min_samples_leaf) continue;
        const double impurity = (static_cast<double>(nl) * gini(lc) +
                                 static_cast<double>(nr) * gini(rc)) /
                                static_cast<double>(members.size());
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = thr;
        }
      }
    }
    if (best_feature < 0) return at;  // every drawn feature constant: leaf

    std::vector<std::size_t> left_members, right_members;
    for (auto i : members) {
      (rows[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_members
                                                                         : right_members)
          .push_back(i);
    }
    members.clear();
    members.shrink_to_fit();
    tree.nodes[at].feature = best_feature;
    tree.nodes[at].threshold = best_threshold;
    const std::size_t left = build(std::move(left_members), depth + 1);
    const std::size_t right = build(std::move(right_members), depth + 1);
    tree.nodes[at].left = left;
    tree.nodes[at].right = right;
    return at;
  }
};

}  // namespace detail

inline RandomForestModel rf_fit(const std::vector<std::vector<double>>& rows,
                                const std::vector<int>& labels, const RfHyper& hyper, Rng& rng) {
  if (rows.size() < 2) throw std::invalid_argument("rf_fit: need at least 2 samples");
  if (rows.size() != labels.size()) throw std::invalid_argument("rf_fit: rows/labels mismatch");
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("rf_fit: labels must be 0/1");
  }

  RandomForestModel model;
  model.hyper = hyper;

  bool has0 = false, has1 = false;
  for (int y : labels) (y ? has1 : has0) = true;
  if (!has0 || !has1) {
    model.single_class = true;
    model.constant_label = labels[0];
    model.warnings.push_back("single-class training data: constant classifier");
    return model;
  }

  const std::size_t n = rows.size();
  const std::size_t n_features = rows[0].size();
  const std::size_t subset =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));

  model.trees.reserve(hyper.n_estimators);
  for (std::size_t t = 0; t < hyper.n_estimators; ++t) {
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = rng.below(n);
    DecisionTree tree;
    detail::TreeBuilder builder{rows, labels, hyper, rng, tree, n_features, subset};
    builder.build(std::move(sample), 0);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

inline int rf_predict_one(const RandomForestModel& model, const std::vector<double>& row) {
  if (model.single_class) return model.constant_label;
  std::size_t votes1 = 0;
  for (const auto& tree : model.trees) votes1 += static_cast<std::size_t>(tree.predict(row));
  return 2 * votes1 > model.trees.size() ? 1 : 0;  // tie -> class 0
}

inline std::vector<int> rf_predict(const RandomForestModel& model,
                                   const std::vector<std::vector<double>>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(rf_predict_one(model, row));
  return out;
}

}  // namespace truewalks
