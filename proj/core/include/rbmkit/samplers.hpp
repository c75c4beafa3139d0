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

#include <rbmkit/rbm.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rbmkit {

class Rng;

enum class SamplerKind { gibbs, simulated_annealing, exact, chimera };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);

/// Linear inverse-temperature ramp.
struct AnnealSchedule {
  double beta_start = 0.1;
  double beta_end = 1.0;
  int n_sweeps = 100;

  /// beta at sweep s of n_sweeps (s = 0 .. n_sweeps-1).
  double beta_at(int sweep) const;
};

struct SamplerConfig {
  SamplerKind kind = SamplerKind::gibbs;
  int n_samples = 100;
  int gibbs_postprocess_sweeps = 2;
  int burn_in_sweeps = 100;
  AnnealSchedule sa;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument on n_samples < 1, negative sweep counts,
  /// or a schedule without beta_end >= beta_start > 0.
  void validate() const;
};

struct ChainState {
  BitVector v;
  BitVector h;

  bool operator==(const ChainState&) const = default;
};

struct SampleSet {
  std::vector<ChainState> states;
  std::vector<double> energies;
  std::string source;
  /// Fraction of decoded chains whose qubits disagreed (embedded samplers).
  std::optional<double> broken_chain_fraction;

  std::size_t size() const { return states.size(); }
  void push_back(ChainState state, const RbmParams& params);
};

/// One block heat-bath sweep: all h from p(h|v), then all v from p(v|h), at
/// inverse temperature beta.
ChainState gibbs_sweep(const RbmParams& params, ChainState state, Rng& rng, double beta = 1.0);

/// In-place variant used by the hot loops.
void gibbs_sweep_inplace(const RbmParams& params, ChainState& state, Rng& rng,
                         double beta = 1.0);

/// CD-k negative phase: one chain per minibatch row, started at the row.
SampleSet cd_negative_phase(const RbmParams& params, std::span<const BitVector> minibatch,
                            int k, Rng& rng);

/// n_samples chains from uniformly random visible states, burn_in_sweeps
/// sweeps each at beta = 1. Chain c draws from stream (rng_seed, c).
SampleSet gibbs_sample(const RbmParams& params, const SamplerConfig& config);

/// n_samples independent anneals along config.sa followed by
/// config.gibbs_postprocess_sweeps sweeps at beta = 1.
SampleSet simulated_anneal(const RbmParams& params, const SamplerConfig& config);

/// I.i.d. draws from the exact joint distribution at beta = 1.
SampleSet exact_sample(const RbmParams& params, int n_samples, std::uint64_t seed);

/// CSV with header chain_id,energy,v_bits,h_bits.
void write_sample_csv(const SampleSet& samples, std::ostream& out);

/// Recomputes every energy; returns the largest absolute discrepancy.
double max_energy_error(const RbmParams& params, const SampleSet& samples);

/// Uniform negative-phase source interface. Implementations are pure
/// functions of (params, configuration, seed).
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual SampleSet sample(const RbmParams& params, std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
  /// True when sample() draws from the exact distribution, letting callers
  /// substitute enumerated expectations.
  virtual bool is_exact() const { return false; }
};

class GibbsSampler : public Sampler {
 public:
  explicit GibbsSampler(SamplerConfig config);
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override { return "gibbs"; }

 private:
  SamplerConfig config_;
};

class AnnealingSampler : public Sampler {
 public:
  explicit AnnealingSampler(SamplerConfig config);
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override { return "simulated_annealing"; }

 private:
  SamplerConfig config_;
};

class ExactSampler : public Sampler {
 public:
  explicit ExactSampler(int n_samples);
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override { return "exact"; }
  bool is_exact() const override { return true; }

 private:
  int n_samples_;
};

/// Runs an inner sampler on params scaled by `beta_multiplier`; models a
/// device whose effective inverse temperature differs from the requested one.
class ScaledSampler : public Sampler {
 public:
  ScaledSampler(std::shared_ptr<const Sampler> inner, double beta_multiplier);
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override;

 private:
  std::shared_ptr<const Sampler> inner_;
  double beta_multiplier_;
};

/// Uniformly random bit strings for both layers: the random seed baseline
/// for steps-to-equilibrium comparisons.
class RandomBitstringSampler : public Sampler {
 public:
  explicit RandomBitstringSampler(int n_samples);
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override { return "random_bits"; }

 private:
  int n_samples_;
};

/// n copies of one fixed state (all-zeros by default).
class ConstantSampler : public Sampler {
 public:
  explicit ConstantSampler(int n_samples, std::uint8_t bit = 0);
  SampleSet sample(const RbmParams& params, std::uint64_t seed) const override;
  std::string name() const override;

 private:
  int n_samples_;
  std::uint8_t bit_;
};

/// Builds the sampler for gibbs / simulated_annealing / exact kinds. The
/// chimera kind needs an embedding; see make_chimera_sampler.
std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config);

}  // namespace rbmkit
