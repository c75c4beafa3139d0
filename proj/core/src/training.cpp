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

#include <rbmkit/training.hpp>

#include <rbmkit/chimera.hpp>
#include <rbmkit/error.hpp>
#include <rbmkit/exact.hpp>
#include <rbmkit/random.hpp>
#include <rbmkit/thermometry.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rbmkit {

// ---------------------------------------------------------------------------
// GradientEstimate

GradientEstimate GradientEstimate::zeros(int n_visible, int n_hidden) {
  return {Eigen::MatrixXd::Zero(n_visible, n_hidden), Eigen::VectorXd::Zero(n_visible),
          Eigen::VectorXd::Zero(n_hidden)};
}

GradientEstimate& GradientEstimate::operator+=(const GradientEstimate& o) {
  dW += o.dW;
  db += o.db;
  dc += o.dc;
  return *this;
}

GradientEstimate& GradientEstimate::operator-=(const GradientEstimate& o) {
  dW -= o.dW;
  db -= o.db;
  dc -= o.dc;
  return *this;
}

GradientEstimate& GradientEstimate::operator*=(double s) {
  dW *= s;
  db *= s;
  dc *= s;
  return *this;
}

double GradientEstimate::dot(const GradientEstimate& o) const {
  return dW.cwiseProduct(o.dW).sum() + db.dot(o.db) + dc.dot(o.dc);
}

double GradientEstimate::norm() const { return std::sqrt(dot(*this)); }

double GradientEstimate::max_abs() const {
  return std::max({dW.cwiseAbs().maxCoeff(), db.cwiseAbs().maxCoeff(), dc.cwiseAbs().maxCoeff()});
}

double GradientEstimate::cosine(const GradientEstimate& o) const {
  const double denom = norm() * o.norm();
  return denom > 0.0 ? dot(o) / denom : 0.0;
}

// ---------------------------------------------------------------------------
// Phases

namespace {

void require_rows(const RbmParams& params, std::span<const BitVector> rows, const char* what) {
  if (rows.empty()) throw std::invalid_argument(std::string(what) + ": empty batch");
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != params.n_visible()) {
      std::ostringstream msg;
      msg << what << ": row has " << row.size() << " bits, model expects " << params.n_visible();
      throw DimensionError(msg.str());
    }
  }
}

}  // namespace

GradientEstimate positive_phase(const RbmParams& params, std::span<const BitVector> rows,
                                std::span<const double> weights) {
  require_rows(params, rows, "positive_phase");
  if (!weights.empty() && weights.size() != rows.size()) {
    throw DimensionError("positive_phase: one weight per row required");
  }
  GradientEstimate g = GradientEstimate::zeros(params.n_visible(), params.n_hidden());
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double w = weights.empty() ? 1.0 : weights[r];
    if (w < 0.0) throw std::invalid_argument("positive_phase: negative weight");
    if (w == 0.0) continue;
    const Eigen::VectorXd sig = cond_hidden(params, rows[r]);
    g.dc += w * sig;
    for (int i = 0; i < params.n_visible(); ++i) {
      if (!rows[r][i]) continue;
      g.db(i) += w;
      g.dW.row(i) += w * sig.transpose();
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("positive_phase: weights sum to zero");
  g *= 1.0 / total;
  return g;
}

GradientEstimate model_phase(const RbmParams& params, const SampleSet& samples) {
  if (samples.size() == 0) throw std::invalid_argument("model_phase: empty sample set");
  std::vector<BitVector> visibles;
  visibles.reserve(samples.size());
  for (const auto& s : samples.states) visibles.push_back(s.v);
  return positive_phase(params, visibles);
}

GradientEstimate exact_model_phase(const RbmParams& params) {
  const ModelMoments m = ExactModel(params).moments();
  return {m.vh, m.v, m.h};
}

GradientEstimate exact_generative_gradient(const RbmParams& params,
                                           std::span<const BitVector> rows) {
  return positive_phase(params, rows) - exact_model_phase(params);
}

GradientEstimate generative_gradient(const RbmParams& params, std::span<const BitVector> rows,
                                     const Sampler& sampler, std::uint64_t seed) {
  if (sampler.is_exact() && params.n_units() <= kEnumerationBudget) {
    return exact_generative_gradient(params, rows);
  }
  return positive_phase(params, rows) - model_phase(params, sampler.sample(params, seed));
}

GradientEstimate cd_gradient(const RbmParams& params, std::span<const BitVector> rows, int k,
                             Rng& rng) {
  const SampleSet negative = cd_negative_phase(params, rows, k, rng);
  return positive_phase(params, rows) - model_phase(params, negative);
}

GradientEstimate discriminative_gradient(const RbmParams& params,
                                         std::span<const BitVector> rows) {
  require_rows(params, rows, "discriminative_gradient");
  if (params.n_visible() < 2) throw DimensionError("discriminative_gradient: no class bit");
  const int nv = params.n_visible();
  const int last = nv - 1;
  GradientEstimate g = GradientEstimate::zeros(nv, params.n_hidden());
  for (const auto& row : rows) {
    // Hidden fields with the class bit off and on.
    Eigen::VectorXd field0 = params.c;
    for (int i = 0; i < last; ++i) {
      if (row[i]) field0 += params.W.row(i).transpose();
    }
    const Eigen::VectorXd field1 = field0 + params.W.row(last).transpose();
    double neg_f0 = 0.0;
    for (int i = 0; i < last; ++i) {
      if (row[i]) neg_f0 += params.b(i);
    }
    double neg_f1 = neg_f0 + params.b(last);
    for (Eigen::Index j = 0; j < field0.size(); ++j) {
      neg_f0 += softplus(field0(j));
      neg_f1 += softplus(field1(j));
    }
    const double p1 = logistic(neg_f1 - neg_f0);
    const double p0 = 1.0 - p1;
    const double y = row[last] ? 1.0 : 0.0;
    const Eigen::VectorXd sig0 = field0.unaryExpr([](double x) { return logistic(x); });
    const Eigen::VectorXd sig1 = field1.unaryExpr([](double x) { return logistic(x); });
    // Realized-class gradient of -F minus its posterior average.
    const Eigen::VectorXd hidden_term = (y > 0.5 ? sig1 : sig0) - (p0 * sig0 + p1 * sig1);
    g.dc += hidden_term;
    for (int i = 0; i < last; ++i) {
      if (row[i]) g.dW.row(i) += hidden_term.transpose();
    }
    g.db(last) += y - p1;
    g.dW.row(last) += ((y > 0.5 ? sig1 : Eigen::VectorXd::Zero(sig1.size())) - p1 * sig1).transpose();
  }
  g *= 1.0 / static_cast<double>(rows.size());
  return g;
}

GradientEstimate mix_gradients(const GradientEstimate& generative,
                               const GradientEstimate& discriminative, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("hybrid: lambda must be >= 0");
  const double w_gen = lambda / (1.0 + lambda);
  const double w_disc = 1.0 / (1.0 + lambda);
  return w_gen * generative + w_disc * discriminative;
}

GradientEstimate hybrid_gradient(const RbmParams& params, std::span<const BitVector> rows,
                                 const Sampler& sampler, std::uint64_t seed, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("hybrid: lambda must be >= 0");
  return mix_gradients(generative_gradient(params, rows, sampler, seed),
                       discriminative_gradient(params, rows), lambda);
}

double mean_log_likelihood(const RbmParams& params, std::span<const BitVector> rows) {
  require_rows(params, rows, "mean_log_likelihood");
  const double log_z = log_partition_function(params);
  double total = 0.0;
  for (const auto& row : rows) total += -free_energy(params, row) - log_z;
  return total / static_cast<double>(rows.size());
}

double mean_conditional_log_likelihood(const RbmParams& params, std::span<const BitVector> rows) {
  require_rows(params, rows, "mean_conditional_log_likelihood");
  double total = 0.0;
  for (const auto& row : rows) {
    BitVector v = row;
    v.back() = 0;
    const double a = -free_energy(params, v);
    v.back() = 1;
    const double b = -free_energy(params, v);
    const double m = std::max(a, b);
    const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    total += (row.back() ? b : a) - lse;
  }
  return total / static_cast<double>(rows.size());
}

void apply_gradient(RbmParams& params, const GradientEstimate& gradient, double learning_rate) {
  params.W += learning_rate * gradient.dW;
  params.b += learning_rate * gradient.db;
  params.c += learning_rate * gradient.dc;
}

// ---------------------------------------------------------------------------
// Training loop

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::cd: return "cd";
    case Algorithm::sampler_generative: return "sampler_generative";
    case Algorithm::discriminative: return "discriminative";
    case Algorithm::hybrid: return "hybrid";
    case Algorithm::annealed_hybrid: return "annealed_hybrid";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "cd") return Algorithm::cd;
  if (name == "sampler_generative" || name == "generative") return Algorithm::sampler_generative;
  if (name == "discriminative") return Algorithm::discriminative;
  if (name == "hybrid") return Algorithm::hybrid;
  if (name == "annealed_hybrid") return Algorithm::annealed_hybrid;
  throw std::invalid_argument("unknown training algorithm '" + name + "'");
}

void TrainConfig::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("train: lambda must be >= 0");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("train: learning_rate must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (n_epochs < 0) throw std::invalid_argument("train: n_epochs must be >= 0");
  if (switch_epoch < 0 || switch_epoch > n_epochs) {
    throw std::invalid_argument("train: switch_epoch must lie in [0, n_epochs]");
  }
  if (cd_k < 1) throw std::invalid_argument("train: cd_k must be >= 1");
  if (weight_clip && !(*weight_clip > 0.0)) throw std::invalid_argument("train: weight_clip must be positive");
  if (l2 < 0.0) throw std::invalid_argument("train: l2 must be >= 0");
  sampler.validate();
}

double mean_abs_coupling(const RbmParams& params) { return params.W.cwiseAbs().mean(); }

double median_abs_coupling(const RbmParams& params) {
  std::vector<double> values(params.W.size());
  Eigen::Map<Eigen::MatrixXd>(values.data(), params.W.rows(), params.W.cols()) = params.W.cwiseAbs();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

bool uses_sampler(const TrainConfig& config) {
  switch (config.algorithm) {
    case Algorithm::sampler_generative:
    case Algorithm::hybrid: return true;
    case Algorithm::annealed_hybrid: return config.switch_epoch > 0;
    default: return false;
  }
}

constexpr std::uint64_t kShuffleStream = 0x5348;
constexpr std::uint64_t kCdStream = 0x4344;
constexpr std::uint64_t kBetaStream = 0x4245;

}  // namespace

TrainResult train(const RbmParams& initial, const std::vector<BitVector>& train_rows,
                  const std::vector<BitVector>& test_rows, const TrainConfig& config,
                  const Sampler* sampler, const EpochCallback& on_epoch) {
  config.validate();
  initial.validate();
  require_rows(initial, train_rows, "train: training set");
  require_rows(initial, test_rows, "train: test set");

  std::unique_ptr<Sampler> owned;
  if (uses_sampler(config) && sampler == nullptr) {
    owned = make_sampler(config.sampler, initial.n_visible(), initial.n_hidden());
    sampler = owned.get();
  }

  TrainResult result{initial, {}};
  RbmParams& params = result.params;
  const Rng base(config.rng_seed);
  std::uint64_t step = 0;
  double beta_eff = 1.0;
  std::optional<double> last_beta;
  std::vector<BitVector> batch;
  batch.reserve(config.batch_size);

  for (int epoch = 0; epoch < config.n_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Algorithm algo = config.algorithm;
    if (algo == Algorithm::annealed_hybrid) {
      algo = epoch < config.switch_epoch ? Algorithm::sampler_generative : Algorithm::discriminative;
    }
    Rng shuffle_rng = base.split(Rng::mix(kShuffleStream, epoch));
    const auto order = permutation(train_rows.size(), shuffle_rng);

    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t last = std::min(order.size(), first + config.batch_size);
      batch.clear();
      for (std::size_t k = first; k < last; ++k) batch.push_back(train_rows[order[k]]);
      const std::uint64_t sampler_seed = Rng::mix(config.rng_seed, step);

      const bool needs_samples = algo == Algorithm::sampler_generative || algo == Algorithm::hybrid;
      if (needs_samples && config.beta_estimation.enabled) {
        const auto& be = config.beta_estimation;
        const bool due = step == 0 || (be.every_steps > 0 && step % be.every_steps == 0);
        if (due) {
          try {
            const double prior = last_beta.value_or(be.beta_0);
            const TempEstimate est = estimate_beta(params, *sampler, prior, be.n_samples,
                                                   Rng::mix(kBetaStream, step) ^ config.rng_seed);
            if (est.beta_eff > 0.0) {
              beta_eff = est.beta_eff;
              last_beta = est.beta_eff;
            }
          } catch (const EstimationError&) {
            // Keep the previous scaling; the epoch metrics expose beta_eff.
          }
        }
      }
      const RbmParams sampled_params = beta_eff == 1.0 ? params : params.scaled(1.0 / beta_eff);

      GradientEstimate grad;
      switch (algo) {
        case Algorithm::cd: {
          Rng cd_rng = base.split(Rng::mix(kCdStream, step));
          grad = cd_gradient(params, batch, config.cd_k, cd_rng);
          break;
        }
        case Algorithm::sampler_generative:
          grad = positive_phase(params, batch) -
                 (sampler->is_exact() && beta_eff == 1.0
                      ? exact_model_phase(params)
                      : model_phase(params, sampler->sample(sampled_params, sampler_seed)));
          break;
        case Algorithm::discriminative:
          grad = discriminative_gradient(params, batch);
          break;
        case Algorithm::hybrid: {
          GradientEstimate gen =
              positive_phase(params, batch) -
              (sampler->is_exact() && beta_eff == 1.0
                   ? exact_model_phase(params)
                   : model_phase(params, sampler->sample(sampled_params, sampler_seed)));
          grad = mix_gradients(gen, discriminative_gradient(params, batch), config.lambda);
          break;
        }
        case Algorithm::annealed_hybrid:
          throw std::logic_error("train: annealed_hybrid not resolved");
      }
      if (config.l2 > 0.0) grad.dW -= config.l2 * params.W;
      apply_gradient(params, grad, config.learning_rate);
      if (config.weight_clip) {
        const double clip = *config.weight_clip;
        params.W = params.W.cwiseMax(-clip).cwiseMin(clip);
      }
      ++step;
    }

    EpochMetrics m;
    m.epoch = epoch + 1;
    m.train_accuracy = classification_accuracy(params, train_rows);
    m.test_accuracy = classification_accuracy(params, test_rows);
    m.mean_abs_coupling = mean_abs_coupling(params);
    m.median_quadratic_coupling = median_abs_coupling(params);
    if (config.beta_estimation.enabled) m.beta_eff = last_beta;
    m.algorithm = to_string(algo);
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metrics.push_back(m);
    if (on_epoch) on_epoch(params, m);
  }
  return result;
}

}  // namespace rbmkit
