// Copyright 2026 The rbmkit Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <rbmkit/datapipe.hpp>
#include <rbmkit/metrics.hpp>
#include <rbmkit/rbm.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace rbmkit {

// Both baselines read CompressedDataset feature bits directly, the same
// bits the RBM sees before the class bit is appended.

struct LogRegConfig {
  double learning_rate = 0.1;
  int batch_size = 128;  // >= n rows means full-batch gradient descent
  int n_epochs = 100;
  double l2 = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct LogRegModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  double score(const BitVector& features) const;
  std::uint8_t predict(const BitVector& features) const { return score(features) > 0.0 ? 1 : 0; }
};

struct LogRegLoss {
  double loss = 0.0;  // mean negative log-likelihood
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
};

/// Mean logistic loss over `rows` (indices into data, all rows when empty)
/// and its gradient, without the L2 term.
LogRegLoss logistic_loss(const LogRegModel& model, const CompressedDataset& data,
                         const std::vector<std::size_t>& rows = {});

struct LogRegResult {
  LogRegModel model;
  std::vector<EpochMetrics> metrics;  // algorithm "logreg"
};

/// Minibatch SGD from zero weights; rows reshuffled every epoch. An empty
/// test set records NaN test accuracy.
LogRegResult logreg_train(const CompressedDataset& train, const CompressedDataset& test,
                          const LogRegConfig& config);

struct GbtConfig {
  int n_trees = 200;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 1;

  void validate() const;
};

/// Binary-feature regression tree: internal nodes test one bit, children
/// are (bit 0, bit 1).
struct TreeNode {
  int feature = -1;  // -1 for a leaf
  int child0 = -1;
  int child1 = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const BitVector& features) const;
  int depth() const;
};

struct GbtModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double initial_score = 0.0;  // log-odds of the training base rate

  /// initial_score + learning_rate * sum of tree outputs.
  double score(const BitVector& features) const;
  std::uint8_t predict(const BitVector& features) const { return score(features) > 0.0 ? 1 : 0; }
};

struct GbtResult {
  GbtModel model;
  std::vector<EpochMetrics> metrics;  // one row per tree, algorithm "gbt"
};

/// Gradient boosting on logistic loss. Each tree fits the residuals
/// y - p by greedy variance-reduction splits (lowest feature index on ties);
/// leaves take the Newton step sum(r) / sum(p (1 - p)).
GbtResult gbt_train(const CompressedDataset& train, const CompressedDataset& test,
                    const GbtConfig& config);

/// Fraction of rows whose predicted class (score > 0) matches the label.
double evaluate(const LogRegModel& model, const CompressedDataset& data);
double evaluate(const GbtModel& model, const CompressedDataset& data);

}  // namespace rbmkit
