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

#include <rbmkit/baselines.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rbmkit {

namespace {

void require_rows(const CompressedDataset& data, const char* who) {
  if (data.size() == 0) throw std::invalid_argument(std::string(who) + ": empty data");
  data.validate();
}

template <typename Model>
double accuracy(const Model& model, const CompressedDataset& data) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) correct += model.predict(data.features[i]) == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double accuracy_or_nan(auto const& model, const CompressedDataset& data) {
  return data.size() == 0 ? std::numeric_limits<double>::quiet_NaN() : accuracy(model, data);
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression

void LogRegConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("logreg: learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("logreg: batch_size must be >= 1");
  if (n_epochs < 0) throw std::invalid_argument("logreg: n_epochs must be >= 0");
  if (l2 < 0.0) throw std::invalid_argument("logreg: l2 must be nonnegative");
}

double LogRegModel::score(const BitVector& features) const {
  if (features.size() != static_cast<std::size_t>(weights.size())) {
    throw DimensionError("logreg: feature count mismatch");
  }
  double s = bias;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i]) s += weights(static_cast<Eigen::Index>(i));
  }
  return s;
}

LogRegLoss logistic_loss(const LogRegModel& model, const CompressedDataset& data,
                         const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), 0);
  }
  const std::vector<std::size_t>& idx = rows.empty() ? all : rows;
  if (idx.empty()) throw std::invalid_argument("logistic_loss: no rows");

  LogRegLoss out;
  out.grad_weights = Eigen::VectorXd::Zero(model.weights.size());
  for (std::size_t i : idx) {
    const double s = model.score(data.features[i]);
    const double y = data.labels[i];
    // -log p(y|x) = softplus(s) - y s
    out.loss += softplus(s) - y * s;
    const double r = logistic(s) - y;
    out.grad_bias += r;
    for (std::size_t f = 0; f < data.features[i].size(); ++f) {
      if (data.features[i][f]) out.grad_weights(static_cast<Eigen::Index>(f)) += r;
    }
  }
  const double n = static_cast<double>(idx.size());
  out.loss /= n;
  out.grad_weights /= n;
  out.grad_bias /= n;
  return out;
}

LogRegResult logreg_train(const CompressedDataset& train, const CompressedDataset& test,
                          const LogRegConfig& config) {
  config.validate();
  require_rows(train, "logreg_train");
  LogRegResult result;
  result.model.weights = Eigen::VectorXd::Zero(train.n_feature_bits);
  const Rng base(config.rng_seed);
  const std::size_t n = train.size();
  const std::size_t batch = std::min<std::size_t>(n, static_cast<std::size_t>(config.batch_size));

  for (int epoch = 1; epoch <= config.n_epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    if (batch < n) {
      Rng rng = base.split(static_cast<std::uint64_t>(epoch));
      order = permutation(n, rng);
    } else {
      std::iota(order.begin(), order.end(), 0);
    }
    for (std::size_t start = 0; start < n; start += batch) {
      const std::vector<std::size_t> rows(order.begin() + start,
                                          order.begin() + std::min(n, start + batch));
      const LogRegLoss g = logistic_loss(result.model, train, rows);
      result.model.weights -= config.learning_rate * (g.grad_weights + config.l2 * result.model.weights);
      result.model.bias -= config.learning_rate * g.grad_bias;
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.algorithm = "logreg";
    m.train_accuracy = accuracy(result.model, train);
    m.test_accuracy = accuracy_or_nan(result.model, test);
    result.metrics.push_back(m);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gradient boosted trees

void GbtConfig::validate() const {
  if (n_trees < 0) throw std::invalid_argument("gbt: n_trees must be >= 0");
  if (max_depth < 0) throw std::invalid_argument("gbt: max_depth must be >= 0");
  if (learning_rate < 0.0) throw std::invalid_argument("gbt: learning_rate must be nonnegative");
  if (min_samples_leaf < 1) throw std::invalid_argument("gbt: min_samples_leaf must be >= 1");
}

double RegressionTree::predict(const BitVector& features) const {
  int k = 0;
  while (nodes[k].feature >= 0) {
    k = features.at(static_cast<std::size_t>(nodes[k].feature)) ? nodes[k].child1 : nodes[k].child0;
  }
  return nodes[k].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    deepest = std::max(deepest, d[k]);
    if (nodes[k].feature >= 0) {
      d[nodes[k].child0] = d[k] + 1;
      d[nodes[k].child1] = d[k] + 1;
    }
  }
  return deepest;
}

double GbtModel::score(const BitVector& features) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(features);
  return initial_score + learning_rate * sum;
}

namespace {

struct TreeBuilder {
  const CompressedDataset& data;
  const std::vector<double>& residual;
  const std::vector<double>& hessian;
  const GbtConfig& config;
  RegressionTree tree;

  double leaf_value(const std::vector<std::size_t>& rows) const {
    double r = 0.0, h = 0.0;
    for (std::size_t i : rows) {
      r += residual[i];
      h += hessian[i];
    }
    return r / std::max(h, 1e-12);
  }

  int build(const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].value = leaf_value(rows);
    if (depth >= config.max_depth) return id;

    // Variance reduction of a split equals n1 n0 / n (mean1 - mean0)^2.
    const std::size_t n = rows.size();
    double total = 0.0;
    for (std::size_t i : rows) total += residual[i];
    const int n_features = data.n_feature_bits;
    std::vector<double> sum1(n_features, 0.0);
    std::vector<std::size_t> cnt1(n_features, 0);
    for (std::size_t i : rows) {
      const BitVector& x = data.features[i];
      for (int f = 0; f < n_features; ++f) {
        if (x[f]) {
          sum1[f] += residual[i];
          ++cnt1[f];
        }
      }
    }
    int best = -1;
    double best_gain = 1e-12;
    const auto min_leaf = static_cast<std::size_t>(config.min_samples_leaf);
    for (int f = 0; f < n_features; ++f) {
      const std::size_t n1 = cnt1[f];
      const std::size_t n0 = n - n1;
      if (n1 < min_leaf || n0 < min_leaf) continue;
      const double mean1 = sum1[f] / static_cast<double>(n1);
      const double mean0 = (total - sum1[f]) / static_cast<double>(n0);
      const double gain = static_cast<double>(n1) * static_cast<double>(n0) /
                          static_cast<double>(n) * (mean1 - mean0) * (mean1 - mean0);
      if (gain > best_gain) {
        best_gain = gain;
        best = f;
      }
    }
    if (best < 0) return id;

    std::vector<std::size_t> rows0, rows1;
    for (std::size_t i : rows) (data.features[i][best] ? rows1 : rows0).push_back(i);
    tree.nodes[id].feature = best;
    const int c0 = build(rows0, depth + 1);
    const int c1 = build(rows1, depth + 1);
    tree.nodes[id].child0 = c0;
    tree.nodes[id].child1 = c1;
    return id;
  }
};

}  // namespace

GbtResult gbt_train(const CompressedDataset& train, const CompressedDataset& test,
                    const GbtConfig& config) {
  config.validate();
  require_rows(train, "gbt_train");
  const std::size_t n = train.size();
  GbtResult result;
  result.model.learning_rate = config.learning_rate;
  double positives = 0.0;
  for (std::uint8_t y : train.labels) positives += y;
  const double rate = std::clamp(positives / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  result.model.initial_score = std::log(rate / (1.0 - rate));

  std::vector<double> score(n, result.model.initial_score);
  std::vector<double> residual(n), hessian(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 1; t <= config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = logistic(score[i]);
      residual[i] = train.labels[i] - p;
      hessian[i] = p * (1.0 - p);
    }
    TreeBuilder builder{train, residual, hessian, config, {}};
    builder.build(all, 0);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += config.learning_rate * builder.tree.predict(train.features[i]);
    }
    result.model.trees.push_back(std::move(builder.tree));

    EpochMetrics m;
    m.epoch = t;
    m.algorithm = "gbt";
    m.train_accuracy = accuracy(result.model, train);
    m.test_accuracy = accuracy_or_nan(result.model, test);
    result.metrics.push_back(m);
  }
  return result;
}

double evaluate(const LogRegModel& model, const CompressedDataset& data) {
  require_rows(data, "evaluate");
  return accuracy(model, data);
}

double evaluate(const GbtModel& model, const CompressedDataset& data) {
  require_rows(data, "evaluate");
  return accuracy(model, data);
}

}  // namespace rbmkit
