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
#include <rbmkit/samplers.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rbmkit {

class Rng;

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test. The statistic is the exact sup
/// distance between the empirical CDFs (ties handled by stepping over equal
/// values together); the p-value is asymptotic with effective size
/// n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);

/// Result of the two-draw effective-temperature regression.
struct TempEstimate {
  double beta_eff = 0.0;
  double beta_0 = 0.0;
  double x = 0.0;       // second-draw coupling multiplier
  double sigma = 0.0;   // std of first-draw energies (A units)
  double slope = 0.0;
  double intercept = 0.0;  // estimate of log Z1/Z2
  int n_bins_used = 0;
  int n_bins = 0;
};

/// Effective inverse temperature of `sampler` on couplings A = params:
///  1. draw n samples at J1 = A / beta_0,
///  2. histogram their A-energies into ceil(sqrt(2n)) equal-width bins,
///  3. draw n samples at J2 = x J1 with x = 1 + 1/(beta_0 sigma),
///  4. count the second draw into the same bins,
///  5. regress log(n2/n1) on bin-centre energy over bins holding at least
///     five samples in both draws; beta_eff = beta_0 slope / (1 - x).
/// Throws EstimationError when fewer than two bins qualify or x is unusable.
TempEstimate estimate_beta(const RbmParams& params, const Sampler& sampler, double beta_0, int n,
                           std::uint64_t seed);

/// Boltzmann reference at beta = 1: exact draws within the enumeration
/// budget, else one Gibbs chain (1000 burn-in sweeps, then 10 n sweeps
/// thinned every 10).
struct Reference {
  SampleSet samples;
  bool exact = true;
};
Reference boltzmann_reference(const RbmParams& params, int n, std::uint64_t seed);

/// Smallest s <= max_sweeps such that, after s block-Gibbs sweeps of every
/// seed state, the KS p-value against the reference energies exceeds 0.05.
/// Returns max_sweeps + 1 when the threshold is never reached.
int steps_to_boltzmann(const RbmParams& params, const SampleSet& seed_states,
                       const SampleSet& reference, int max_sweeps, Rng& rng);

inline constexpr double kBoltzmannPValue = 0.05;

struct WilsonInterval {
  double p_hat = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n = 0;
};

/// Wilson score interval for k successes in n trials (z = 1.96 gives 95%).
WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct SeedAdvantage {
  std::vector<int> steps_a;
  std::vector<int> steps_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double ratio = 0.0;  // mean_a / mean_b (NaN if mean_b == 0)
  std::size_t a_fewer = 0;
  std::size_t b_fewer = 0;
  std::size_t ties = 0;
  /// P(steps_a < steps_b) over non-tied snapshots; empty when all tied.
  std::optional<WilsonInterval> p_a_fewer;
};

/// For each snapshot, seeds Gibbs chains with each sampler's output and
/// measures steps_to_boltzmann against a shared reference, with the same
/// Gibbs stream for both sides.
SeedAdvantage seed_advantage(std::span<const RbmParams> snapshots, const Sampler& sampler_a,
                             const Sampler& sampler_b, std::uint64_t seed, int max_sweeps = 100,
                             int n_reference = 1000);

struct CouplingKsRow {
  std::size_t checkpoint = 0;
  double mean_abs_coupling = 0.0;
  double max_abs_coupling = 0.0;
  double ks_statistic = 0.0;
  double p_value = 0.0;
  bool exact_reference = true;
};

struct CouplingKsBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_ks = 0.0;
};

struct KsCouplingReport {
  std::vector<CouplingKsRow> rows;
  std::vector<CouplingKsBin> by_mean_coupling;
  std::vector<CouplingKsBin> by_max_coupling;
};

/// KS statistic between n_draws sampler draws and n_draws reference draws
/// for every checkpoint, plus mean KS binned by mean and max |W|.
KsCouplingReport ks_vs_coupling_report(std::span<const RbmParams> checkpoints,
                                       const Sampler& sampler, std::uint64_t seed,
                                       int n_draws = 1000, int n_bins = 10);

void write_ks_report_csv(const KsCouplingReport& report, std::ostream& out);

std::vector<double> energies_of(const SampleSet& samples);

}  // namespace rbmkit
