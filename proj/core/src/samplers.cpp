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

#include <rbmkit/samplers.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/exact.hpp>
#include <rbmkit/random.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbmkit {

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::gibbs: return "gibbs";
    case SamplerKind::simulated_annealing: return "simulated_annealing";
    case SamplerKind::exact: return "exact";
    case SamplerKind::chimera: return "chimera";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "gibbs") return SamplerKind::gibbs;
  if (name == "simulated_annealing" || name == "sa") return SamplerKind::simulated_annealing;
  if (name == "exact") return SamplerKind::exact;
  if (name == "chimera" || name == "qa") return SamplerKind::chimera;
  throw std::invalid_argument("unknown sampler kind '" + name + "'");
}

double AnnealSchedule::beta_at(int sweep) const {
  if (n_sweeps <= 1) return beta_end;
  const double t = static_cast<double>(sweep) / static_cast<double>(n_sweeps - 1);
  return beta_start + (beta_end - beta_start) * t;
}

void SamplerConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("sampler: n_samples must be >= 1");
  if (gibbs_postprocess_sweeps < 0 || burn_in_sweeps < 0) {
    throw std::invalid_argument("sampler: sweep counts must be nonnegative");
  }
  if (!(sa.beta_start > 0.0) || !(sa.beta_end >= sa.beta_start)) {
    throw std::invalid_argument("sampler: schedule needs beta_end >= beta_start > 0");
  }
  if (sa.n_sweeps < 1) throw std::invalid_argument("sampler: schedule needs n_sweeps >= 1");
}

void SampleSet::push_back(ChainState state, const RbmParams& params) {
  energies.push_back(energy(params, state.v, state.h));
  states.push_back(std::move(state));
}

void gibbs_sweep_inplace(const RbmParams& params, ChainState& state, Rng& rng, double beta) {
  const Eigen::VectorXd ph = cond_hidden(params, state.v, beta);
  state.h.resize(ph.size());
  for (Eigen::Index j = 0; j < ph.size(); ++j) state.h[j] = rng.bernoulli(ph(j)) ? 1 : 0;
  const Eigen::VectorXd pv = cond_visible(params, state.h, beta);
  for (Eigen::Index i = 0; i < pv.size(); ++i) state.v[i] = rng.bernoulli(pv(i)) ? 1 : 0;
}

ChainState gibbs_sweep(const RbmParams& params, ChainState state, Rng& rng, double beta) {
  if (static_cast<int>(state.v.size()) != params.n_visible()) {
    throw DimensionError("gibbs_sweep: visible state has wrong length");
  }
  if (!state.h.empty() && static_cast<int>(state.h.size()) != params.n_hidden()) {
    throw DimensionError("gibbs_sweep: hidden state has wrong length");
  }
  gibbs_sweep_inplace(params, state, rng, beta);
  return state;
}

namespace {

BitVector random_bits(int n, Rng& rng) {
  BitVector bits(n);
  for (auto& b : bits) b = rng.bernoulli(0.5) ? 1 : 0;
  return bits;
}

}  // namespace

SampleSet cd_negative_phase(const RbmParams& params, std::span<const BitVector> minibatch,
                            int k, Rng& rng) {
  if (minibatch.empty()) throw std::invalid_argument("cd_negative_phase: empty minibatch");
  if (k < 1) throw std::invalid_argument("cd_negative_phase: k must be >= 1");
  SampleSet out;
  out.source = "cd-" + std::to_string(k);
  out.states.reserve(minibatch.size());
  for (std::size_t c = 0; c < minibatch.size(); ++c) {
    if (static_cast<int>(minibatch[c].size()) != params.n_visible()) {
      throw DimensionError("cd_negative_phase: row has wrong length");
    }
    Rng chain_rng = rng.split(c);
    ChainState state{minibatch[c], BitVector(params.n_hidden(), 0)};
    for (int s = 0; s < k; ++s) gibbs_sweep_inplace(params, state, chain_rng);
    out.push_back(std::move(state), params);
  }
  // Advance the caller's generator so consecutive calls use fresh streams.
  rng();
  return out;
}

SampleSet gibbs_sample(const RbmParams& params, const SamplerConfig& config) {
  config.validate();
  SampleSet out;
  out.source = "gibbs";
  out.states.reserve(config.n_samples);
  for (int c = 0; c < config.n_samples; ++c) {
    Rng rng(config.rng_seed, static_cast<std::uint64_t>(c));
    ChainState state{random_bits(params.n_visible(), rng), BitVector(params.n_hidden(), 0)};
    // At least one sweep so the hidden layer is a conditional draw.
    const int sweeps = std::max(1, config.burn_in_sweeps);
    for (int s = 0; s < sweeps; ++s) gibbs_sweep_inplace(params, state, rng);
    out.push_back(std::move(state), params);
  }
  return out;
}

SampleSet simulated_anneal(const RbmParams& params, const SamplerConfig& config) {
  config.validate();
  SampleSet out;
  out.source = "simulated_annealing";
  out.states.reserve(config.n_samples);
  for (int c = 0; c < config.n_samples; ++c) {
    Rng rng(config.rng_seed, static_cast<std::uint64_t>(c));
    ChainState state{random_bits(params.n_visible(), rng), BitVector(params.n_hidden(), 0)};
    for (int s = 0; s < config.sa.n_sweeps; ++s) {
      gibbs_sweep_inplace(params, state, rng, config.sa.beta_at(s));
    }
    for (int s = 0; s < config.gibbs_postprocess_sweeps; ++s) {
      gibbs_sweep_inplace(params, state, rng);
    }
    out.push_back(std::move(state), params);
  }
  return out;
}

SampleSet exact_sample(const RbmParams& params, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("exact_sample: n_samples must be >= 1");
  const ExactModel model(params);
  Rng rng(seed);
  SampleSet out;
  out.source = "exact";
  out.states.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    auto [v, h] = model.draw(rng);
    out.push_back(ChainState{std::move(v), std::move(h)}, params);
  }
  return out;
}

void write_sample_csv(const SampleSet& samples, std::ostream& out) {
  out << "chain_id,energy,v_bits,h_bits\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << i << ',' << samples.energies[i] << ',' << bits_to_string(samples.states[i].v) << ','
        << bits_to_string(samples.states[i].h) << '\n';
  }
  out.precision(old);
}

double max_energy_error(const RbmParams& params, const SampleSet& samples) {
  if (samples.energies.size() != samples.states.size()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double e = energy(params, samples.states[i].v, samples.states[i].h);
    worst = std::max(worst, std::abs(e - samples.energies[i]));
  }
  return worst;
}

GibbsSampler::GibbsSampler(SamplerConfig config) : config_(std::move(config)) {
  config_.validate();
}

SampleSet GibbsSampler::sample(const RbmParams& params, std::uint64_t seed) const {
  SamplerConfig cfg = config_;
  cfg.rng_seed = seed;
  return gibbs_sample(params, cfg);
}

AnnealingSampler::AnnealingSampler(SamplerConfig config) : config_(std::move(config)) {
  config_.validate();
}

SampleSet AnnealingSampler::sample(const RbmParams& params, std::uint64_t seed) const {
  SamplerConfig cfg = config_;
  cfg.rng_seed = seed;
  return simulated_anneal(params, cfg);
}

ExactSampler::ExactSampler(int n_samples) : n_samples_(n_samples) {
  if (n_samples < 1) throw std::invalid_argument("ExactSampler: n_samples must be >= 1");
}

SampleSet ExactSampler::sample(const RbmParams& params, std::uint64_t seed) const {
  return exact_sample(params, n_samples_, seed);
}

ScaledSampler::ScaledSampler(std::shared_ptr<const Sampler> inner, double beta_multiplier)
    : inner_(std::move(inner)), beta_multiplier_(beta_multiplier) {
  if (!inner_) throw std::invalid_argument("ScaledSampler: null inner sampler");
  if (!(beta_multiplier_ > 0.0)) {
    throw std::invalid_argument("ScaledSampler: multiplier must be positive");
  }
}

SampleSet ScaledSampler::sample(const RbmParams& params, std::uint64_t seed) const {
  SampleSet out = inner_->sample(params.scaled(beta_multiplier_), seed);
  // Report energies under the requested couplings, not the device's.
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.energies[i] = energy(params, out.states[i].v, out.states[i].h);
  }
  out.source = name();
  return out;
}

std::string ScaledSampler::name() const {
  std::ostringstream s;
  s << inner_->name() << "@x" << beta_multiplier_;
  return s.str();
}

RandomBitstringSampler::RandomBitstringSampler(int n_samples) : n_samples_(n_samples) {
  if (n_samples < 1) throw std::invalid_argument("RandomBitstringSampler: n_samples must be >= 1");
}

SampleSet RandomBitstringSampler::sample(const RbmParams& params, std::uint64_t seed) const {
  Rng rng(seed);
  SampleSet out;
  out.source = name();
  for (int s = 0; s < n_samples_; ++s) {
    BitVector v = random_bits(params.n_visible(), rng);
    BitVector h = random_bits(params.n_hidden(), rng);
    out.push_back(ChainState{std::move(v), std::move(h)}, params);
  }
  return out;
}

ConstantSampler::ConstantSampler(int n_samples, std::uint8_t bit)
    : n_samples_(n_samples), bit_(bit ? 1 : 0) {
  if (n_samples < 1) throw std::invalid_argument("ConstantSampler: n_samples must be >= 1");
}

SampleSet ConstantSampler::sample(const RbmParams& params, std::uint64_t) const {
  SampleSet out;
  out.source = name();
  const ChainState state{BitVector(params.n_visible(), bit_), BitVector(params.n_hidden(), bit_)};
  for (int s = 0; s < n_samples_; ++s) out.push_back(state, params);
  return out;
}

std::string ConstantSampler::name() const { return bit_ ? "all_ones" : "all_zeros"; }

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config) {
  config.validate();
  switch (config.kind) {
    case SamplerKind::gibbs: return std::make_unique<GibbsSampler>(config);
    case SamplerKind::simulated_annealing: return std::make_unique<AnnealingSampler>(config);
    case SamplerKind::exact: return std::make_unique<ExactSampler>(config.n_samples);
    case SamplerKind::chimera:
      throw std::invalid_argument("make_sampler: chimera sampler needs an embedding");
  }
  throw std::invalid_argument("make_sampler: unknown kind");
}

}  // namespace rbmkit
