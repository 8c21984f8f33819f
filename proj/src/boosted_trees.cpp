// Copyright 2026 The CLiD Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "clid/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clid/common.hpp"

namespace clid {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct SplitChoice {
  int feature = -1;
  double value = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& rows,
              const std::vector<double>& grad, const std::vector<double>& hess,
              const BoostingParams& params)
      : rows_(rows), grad_(grad), hess_(hess), params_(params) {}

  RegressionTree build(std::vector<std::size_t> indices) {
    RegressionTree tree;
    grow(tree, std::move(indices), 0);
    return tree;
  }

 private:
  double leaf_weight(double g, double h) const { return -g / (h + params_.l2); }
  double score(double g, double h) const { return g * g / (h + params_.l2); }

  int grow(RegressionTree& tree, std::vector<std::size_t> indices, int depth) {
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i : indices) {
      g += grad_[i];
      h += hess_[i];
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.nodes[node_id].leaf_weight = leaf_weight(g, h);

    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
    if (depth >= params_.max_depth || indices.size() < 2 * min_leaf) return node_id;

    const SplitChoice split = best_split(indices, g, h);
    if (split.feature < 0) return node_id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : indices) {
      (rows_[i][split.feature] < split.value ? left : right).push_back(i);
    }
    const int l = grow(tree, std::move(left), depth + 1);
    const int r = grow(tree, std::move(right), depth + 1);
    TreeNode& node = tree.nodes[node_id];
    node.feature = split.feature;
    node.split = split.value;
    node.left = l;
    node.right = r;
    return node_id;
  }

  SplitChoice best_split(const std::vector<std::size_t>& indices, double g,
                         double h) const {
    SplitChoice best;
    const double parent = score(g, h);
    const std::size_t n = indices.size();
    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
    const std::size_t n_features = rows_[indices.front()].size();
    std::vector<std::size_t> order(indices);
    for (std::size_t f = 0; f < n_features; ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows_[a][f] < rows_[b][f];
      });
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        gl += grad_[order[pos]];
        hl += hess_[order[pos]];
        const double here = rows_[order[pos]][f];
        const double next = rows_[order[pos + 1]][f];
        if (here == next) continue;
        const std::size_t n_left = pos + 1;
        if (n_left < min_leaf || n - n_left < min_leaf) continue;
        const double gain = score(gl, hl) + score(g - gl, h - hl) - parent;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.value = here + 0.5 * (next - here);
        }
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const BoostingParams& params_;
};

}  // namespace

void BoostingParams::validate() const {
  require(n_trees >= 0, "boosting.n_trees must be >= 0");
  require(max_depth >= 0, "boosting.max_depth must be >= 0");
  require(learning_rate > 0.0, "boosting.learning_rate must be > 0");
  require(min_leaf >= 1, "boosting.min_leaf must be >= 1");
  require(l2 >= 0.0, "boosting.l2 must be >= 0");
}

double RegressionTree::predict(std::span<const double> row) const {
  int id = 0;
  while (!nodes[id].is_leaf()) {
    const TreeNode& node = nodes[id];
    id = row[node.feature] < node.split ? node.left : node.right;
  }
  return nodes[id].leaf_weight;
}

BoostedTreeEnsemble::BoostedTreeEnsemble(std::vector<RegressionTree> trees,
                                         double learning_rate,
                                         double initial_score)
    : trees_(std::move(trees)),
      learning_rate_(learning_rate),
      initial_score_(initial_score) {
  for (const auto& tree : trees_) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) {
        n_features_ = std::max(n_features_, static_cast<std::size_t>(node.feature) + 1);
      }
    }
  }
}

BoostedTreeEnsemble BoostedTreeEnsemble::fit(
    const std::vector<std::vector<double>>& rows, std::span<const bool> labels,
    const BoostingParams& params) {
  params.validate();
  require(rows.size() == labels.size(), "boosting: rows and labels differ in length");
  require(!rows.empty(), "boosting: empty training set");
  const std::size_t width = rows.front().size();
  for (const auto& row : rows) {
    require(row.size() == width, "boosting: feature vectors have ragged lengths");
  }
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const auto n = static_cast<double>(rows.size());
  require(positives > 0 && positives < n, "boosting: both labels required");

  BoostedTreeEnsemble model;
  model.learning_rate_ = params.learning_rate;
  model.initial_score_ = std::log(positives / (n - positives));
  model.n_features_ = width;

  std::vector<double> margin(rows.size(), model.initial_score_);
  std::vector<double> grad(rows.size());
  std::vector<double> hess(rows.size());
  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - (labels[i] ? 1.0 : 0.0);
      hess[i] = p * (1.0 - p);
    }
    RegressionTree tree = TreeBuilder(rows, grad, hess, params).build(all);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      margin[i] += params.learning_rate * tree.predict(rows[i]);
    }
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double BoostedTreeEnsemble::margin(std::span<const double> row) const {
  require(row.size() >= n_features_, "boosting: feature vector too short");
  double total = initial_score_;
  for (const auto& tree : trees_) total += learning_rate_ * tree.predict(row);
  return total;
}

double BoostedTreeEnsemble::confidence(std::span<const double> row) const {
  return sigmoid(margin(row));
}

}  // namespace clid
