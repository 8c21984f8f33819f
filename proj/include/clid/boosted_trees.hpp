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
#ifndef CLID_BOOSTED_TREES_HPP_
#define CLID_BOOSTED_TREES_HPP_

#include <span>
#include <vector>

namespace clid {

struct BoostingParams {
  int n_trees = 50;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_leaf = 5;
  double l2 = 1.0;

  void validate() const;
};

// feature < 0 marks a leaf. Rows with value < split go left.
struct TreeNode {
  int feature = -1;
  double split = 0.0;
  int left = -1;
  int right = -1;
  double leaf_weight = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const;
};

// Gradient-boosted regression trees on the logistic loss with Newton leaf
// weights -G / (H + l2) and exact greedy splits. No subsampling, so fitting
// is a deterministic function of the input order.
class BoostedTreeEnsemble {
 public:
  BoostedTreeEnsemble() = default;
  BoostedTreeEnsemble(std::vector<RegressionTree> trees, double learning_rate,
                      double initial_score);

  static BoostedTreeEnsemble fit(const std::vector<std::vector<double>>& rows,
                                 std::span<const bool> labels,
                                 const BoostingParams& params);

  double margin(std::span<const double> row) const;
  // sigmoid(margin), in (0, 1).
  double confidence(std::span<const double> row) const;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  double learning_rate() const { return learning_rate_; }
  double initial_score() const { return initial_score_; }
  std::size_t n_features() const { return n_features_; }

 private:
  std::vector<RegressionTree> trees_;
  double learning_rate_ = 0.1;
  double initial_score_ = 0.0;
  std::size_t n_features_ = 0;
};

}  // namespace clid

#endif  // CLID_BOOSTED_TREES_HPP_
