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

#include <rbmkit/metrics.hpp>
#include <rbmkit/rbm.hpp>
#include <rbmkit/samplers.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rbmkit {

class Rng;

/// Log-likelihood ascent direction, averaged over the minibatch:
///   db = <v>_data - <v>_model, dc = <h>_data - <h>_model,
///   dW = <v hᵀ>_data - <v hᵀ>_model.
/// With canonical-sign parameters this equals -∂L/∂θ for L the negative
/// log-likelihood, so training steps are params += learning_rate * g.
struct GradientEstimate {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
  Eigen::VectorXd dc;

  static GradientEstimate zeros(int n_visible, int n_hidden);

  GradientEstimate& operator+=(const GradientEstimate& o);
  GradientEstimate& operator-=(const GradientEstimate& o);
  GradientEstimate& operator*=(double s);
  friend GradientEstimate operator+(GradientEstimate a, const GradientEstimate& b) { return a += b; }
  friend GradientEstimate operator-(GradientEstimate a, const GradientEstimate& b) { return a -= b; }
  friend GradientEstimate operator*(double s, GradientEstimate a) { return a *= s; }

  double dot(const GradientEstimate& o) const;
  double norm() const;
  double max_abs() const;
  /// Cosine similarity; 0 when either side is zero.
  double cosine(const GradientEstimate& o) const;
};

/// Data expectations with exact hidden conditional means. Optional weights
/// (one per row, nonnegative, not all zero) turn the mean into a weighted mean.
GradientEstimate positive_phase(const RbmParams& params, std::span<const BitVector> rows,
                                std::span<const double> weights = {});

/// Model expectations estimated from samples; hidden units use
/// p(h | sampled v) instead of the sampled h.
GradientEstimate model_phase(const RbmParams& params, const SampleSet& samples);

/// Enumerated model expectations.
GradientEstimate exact_model_phase(const RbmParams& params);

/// positive_phase minus the sampler's model term. An exact sampler on a
/// model within the enumeration budget uses exact_model_phase instead.
GradientEstimate generative_gradient(const RbmParams& params, std::span<const BitVector> rows,
                                     const Sampler& sampler, std::uint64_t seed);

/// positive_phase minus exact_model_phase.
GradientEstimate exact_generative_gradient(const RbmParams& params,
                                           std::span<const BitVector> rows);

/// Contrastive divergence with k sweeps from each row.
GradientEstimate cd_gradient(const RbmParams& params, std::span<const BitVector> rows, int k,
                             Rng& rng);

/// Exact gradient of the mean log p(class | image); class bit is the last
/// visible unit. Linear in n_hidden per row, no sampling.
GradientEstimate discriminative_gradient(const RbmParams& params, std::span<const BitVector> rows);

/// lambda/(1+lambda) * generative + 1/(1+lambda) * discriminative.
GradientEstimate hybrid_gradient(const RbmParams& params, std::span<const BitVector> rows,
                                 const Sampler& sampler, std::uint64_t seed, double lambda);
GradientEstimate mix_gradients(const GradientEstimate& generative,
                               const GradientEstimate& discriminative, double lambda);

/// Mean log p(v) over rows, by enumeration.
double mean_log_likelihood(const RbmParams& params, std::span<const BitVector> rows);
/// Mean log p(class | image) over rows.
double mean_conditional_log_likelihood(const RbmParams& params, std::span<const BitVector> rows);

/// Optimization parameters for params += learning_rate * gradient.
void apply_gradient(RbmParams& params, const GradientEstimate& gradient, double learning_rate);

enum class Algorithm { cd, sampler_generative, discriminative, hybrid, annealed_hybrid };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

/// Optional temperature estimation for the negative-phase sampler: when on,
/// the sampler receives params / beta_eff.
struct BetaEstimationConfig {
  bool enabled = false;
  double beta_0 = 3.0;
  int n_samples = 1000;
  int every_steps = 0;  // 0: once, at the first step
};

struct TrainConfig {
  Algorithm algorithm = Algorithm::discriminative;
  double lambda = 0.01;
  int switch_epoch = 0;
  double learning_rate = 0.05;
  int batch_size = 128;
  int n_epochs = 100;
  int cd_k = 1;
  SamplerConfig sampler;
  std::optional<double> weight_clip;
  double l2 = 0.0;
  std::uint64_t rng_seed = 0;
  BetaEstimationConfig beta_estimation;

  void validate() const;
};

struct TrainResult {
  RbmParams params;
  std::vector<EpochMetrics> metrics;
};

/// Called after every epoch with the updated parameters and that epoch's
/// metrics (used for checkpoints and progress output).
using EpochCallback = std::function<void(const RbmParams&, const EpochMetrics&)>;

/// Minibatch SGD over `train_rows` (class bit last). Epoch e reshuffles with
/// stream (seed, e); the sampler seed at global step t is derived from
/// (seed, t). annealed_hybrid uses the sampler-generative gradient while
/// epoch < switch_epoch (0-based) and the discriminative gradient after.
TrainResult train(const RbmParams& initial, const std::vector<BitVector>& train_rows,
                  const std::vector<BitVector>& test_rows, const TrainConfig& config,
                  const Sampler* sampler = nullptr, const EpochCallback& on_epoch = {});

double mean_abs_coupling(const RbmParams& params);
double median_abs_coupling(const RbmParams& params);

}  // namespace rbmkit
