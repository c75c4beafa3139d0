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

#include <rbmkit/thermometry.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/exact.hpp>
#include <rbmkit/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbmkit {

std::vector<double> energies_of(const SampleSet& samples) { return samples.energies; }

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form of the CDF converges quickly here.
    const double a = -M_PI * M_PI / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(a * (2 * k - 1) * (2 * k - 1));
      cdf += term;
      if (term < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * M_PI) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  KsResult r;
  r.statistic = d;
  r.n1 = a.size();
  r.n2 = b.size();
  const double ne = n1 * n2 / (n1 + n2);
  r.p_value = kolmogorov_survival(std::sqrt(ne) * d);
  return r;
}

// ---------------------------------------------------------------------------
// Temperature estimation

namespace {

// Calls the sampler with derived seeds until n states are collected.
SampleSet draw_n(const Sampler& sampler, const RbmParams& params, int n, std::uint64_t seed) {
  SampleSet out;
  for (std::uint64_t call = 0; static_cast<int>(out.size()) < n; ++call) {
    SampleSet part = sampler.sample(params, Rng::mix(seed, call));
    if (part.size() == 0) throw std::runtime_error("sampler returned no samples");
    if (out.source.empty()) out.source = part.source;
    for (std::size_t k = 0; k < part.size() && static_cast<int>(out.size()) < n; ++k) {
      out.states.push_back(std::move(part.states[k]));
      out.energies.push_back(part.energies[k]);
    }
  }
  return out;
}

std::vector<double> energies_under(const RbmParams& params, const SampleSet& samples) {
  std::vector<double> e;
  e.reserve(samples.size());
  for (const auto& s : samples.states) e.push_back(energy(params, s.v, s.h));
  return e;
}

}  // namespace

TempEstimate estimate_beta(const RbmParams& params, const Sampler& sampler, double beta_0, int n,
                           std::uint64_t seed) {
  if (n < 50) throw std::invalid_argument("estimate_beta: n must be >= 50");
  if (!(beta_0 > 0.0)) throw std::invalid_argument("estimate_beta: beta_0 must be positive");

  TempEstimate est;
  est.beta_0 = beta_0;
  const RbmParams j1 = params.scaled(1.0 / beta_0);
  const std::vector<double> e1 = energies_under(params, draw_n(sampler, j1, n, Rng::mix(seed, 1)));

  const double mean = std::accumulate(e1.begin(), e1.end(), 0.0) / n;
  double var = 0.0;
  for (double e : e1) var += (e - mean) * (e - mean);
  est.sigma = std::sqrt(var / (n - 1));
  if (!(est.sigma > 0.0) || !std::isfinite(est.sigma)) {
    throw EstimationError("estimate_beta: first draw has zero energy spread");
  }
  est.x = 1.0 + 1.0 / (beta_0 * est.sigma);
  if (!std::isfinite(est.x) || est.x == 1.0) {
    throw EstimationError("estimate_beta: coupling multiplier x is unusable");
  }

  est.n_bins = static_cast<int>(std::ceil(std::sqrt(2.0 * n)));
  const auto [lo_it, hi_it] = std::minmax_element(e1.begin(), e1.end());
  const double lo = *lo_it;
  const double width = (*hi_it - lo) / est.n_bins;
  if (!(width > 0.0)) throw EstimationError("estimate_beta: degenerate energy range");
  auto bin_of = [&](double e) -> int {
    if (e < lo) return -1;
    int k = static_cast<int>((e - lo) / width);
    if (k == est.n_bins && e <= *hi_it) k = est.n_bins - 1;
    return k < est.n_bins ? k : -1;
  };
  std::vector<int> n1(est.n_bins, 0), n2(est.n_bins, 0);
  for (double e : e1) {
    if (const int k = bin_of(e); k >= 0) ++n1[k];
  }

  const RbmParams j2 = params.scaled(est.x / beta_0);
  for (double e : energies_under(params, draw_n(sampler, j2, n, Rng::mix(seed, 2)))) {
    if (const int k = bin_of(e); k >= 0) ++n2[k];
  }

  std::vector<double> xs, ys;
  for (int k = 0; k < est.n_bins; ++k) {
    if (n1[k] >= 5 && n2[k] >= 5) {
      xs.push_back(lo + (k + 0.5) * width);
      ys.push_back(std::log(static_cast<double>(n2[k]) / static_cast<double>(n1[k])));
    }
  }
  est.n_bins_used = static_cast<int>(xs.size());
  if (est.n_bins_used < 2) {
    throw EstimationError("estimate_beta: only " + std::to_string(est.n_bins_used) +
                          " bins hold >= 5 samples in both draws");
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.beta_eff = beta_0 * est.slope / (1.0 - est.x);
  return est;
}

// ---------------------------------------------------------------------------
// Steps to equilibrium

Reference boltzmann_reference(const RbmParams& params, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("boltzmann_reference: n must be >= 1");
  if (params.n_units() <= kEnumerationBudget) return {exact_sample(params, n, seed), true};
  constexpr int kThin = 10;
  constexpr int kBurnIn = 1000;
  Rng rng(seed);
  ChainState state{BitVector(params.n_visible()), BitVector(params.n_hidden(), 0)};
  for (auto& bit : state.v) bit = rng.bernoulli(0.5) ? 1 : 0;
  for (int s = 0; s < kBurnIn; ++s) gibbs_sweep_inplace(params, state, rng);
  Reference ref;
  ref.exact = false;
  ref.samples.source = "gibbs_chain_reference";
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < kThin; ++s) gibbs_sweep_inplace(params, state, rng);
    ref.samples.push_back(state, params);
  }
  return ref;
}

int steps_to_boltzmann(const RbmParams& params, const SampleSet& seed_states,
                       const SampleSet& reference, int max_sweeps, Rng& rng) {
  if (seed_states.size() == 0 || reference.size() == 0) {
    throw std::invalid_argument("steps_to_boltzmann: empty inputs");
  }
  if (max_sweeps < 0) throw std::invalid_argument("steps_to_boltzmann: max_sweeps must be >= 0");
  std::vector<ChainState> states = seed_states.states;
  std::vector<Rng> chain_rngs;
  chain_rngs.reserve(states.size());
  for (std::size_t c = 0; c < states.size(); ++c) chain_rngs.push_back(rng.split(c));
  rng();
  std::vector<double> e(states.size());
  for (int s = 0;; ++s) {
    for (std::size_t c = 0; c < states.size(); ++c) e[c] = energy(params, states[c].v, states[c].h);
    if (ks_two_sample(e, reference.energies).p_value > kBoltzmannPValue) return s;
    if (s == max_sweeps) break;
    for (std::size_t c = 0; c < states.size(); ++c) {
      gibbs_sweep_inplace(params, states[c], chain_rngs[c]);
    }
  }
  return max_sweeps + 1;
}

WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be positive");
  if (k > n) throw std::invalid_argument("wilson_interval: k exceeds n");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half), n};
}

SeedAdvantage seed_advantage(std::span<const RbmParams> snapshots, const Sampler& sampler_a,
                             const Sampler& sampler_b, std::uint64_t seed, int max_sweeps,
                             int n_reference) {
  if (snapshots.size() < 2) throw std::invalid_argument("seed_advantage: need >= 2 snapshots");
  SeedAdvantage out;
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const RbmParams& params = snapshots[k];
    const std::uint64_t snap_seed = Rng::mix(seed, k);
    const Reference ref = boltzmann_reference(params, n_reference, Rng::mix(snap_seed, 0));
    const SampleSet seeds_a = sampler_a.sample(params, Rng::mix(snap_seed, 1));
    const SampleSet seeds_b = sampler_b.sample(params, Rng::mix(snap_seed, 1));
    Rng gibbs_a(snap_seed, 2);
    Rng gibbs_b(snap_seed, 2);
    const int sa = steps_to_boltzmann(params, seeds_a, ref.samples, max_sweeps, gibbs_a);
    const int sb = steps_to_boltzmann(params, seeds_b, ref.samples, max_sweeps, gibbs_b);
    out.steps_a.push_back(sa);
    out.steps_b.push_back(sb);
    if (sa < sb) {
      ++out.a_fewer;
    } else if (sb < sa) {
      ++out.b_fewer;
    } else {
      ++out.ties;
    }
  }
  const double n = static_cast<double>(snapshots.size());
  out.mean_a = std::accumulate(out.steps_a.begin(), out.steps_a.end(), 0.0) / n;
  out.mean_b = std::accumulate(out.steps_b.begin(), out.steps_b.end(), 0.0) / n;
  out.ratio = out.mean_b != 0.0 ? out.mean_a / out.mean_b : std::numeric_limits<double>::quiet_NaN();
  const std::size_t decided = out.a_fewer + out.b_fewer;
  if (decided > 0) out.p_a_fewer = wilson_interval(out.a_fewer, decided);
  return out;
}

// ---------------------------------------------------------------------------
// KS versus coupling

namespace {

std::vector<CouplingKsBin> bin_rows(const std::vector<CouplingKsRow>& rows, int n_bins,
                                    double CouplingKsRow::*key) {
  std::vector<CouplingKsBin> bins;
  if (rows.empty()) return bins;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.*key);
    hi = std::max(hi, r.*key);
  }
  const double width = hi > lo ? (hi - lo) / n_bins : 1.0;
  bins.resize(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    bins[k].lower = lo + k * width;
    bins[k].upper = lo + (k + 1) * width;
  }
  for (const auto& r : rows) {
    int k = static_cast<int>((r.*key - lo) / width);
    k = std::clamp(k, 0, n_bins - 1);
    bins[k].count += 1;
    bins[k].mean_ks += r.ks_statistic;
  }
  std::vector<CouplingKsBin> kept;
  for (auto& b : bins) {
    if (b.count == 0) continue;
    b.mean_ks /= static_cast<double>(b.count);
    kept.push_back(b);
  }
  return kept;
}

}  // namespace

KsCouplingReport ks_vs_coupling_report(std::span<const RbmParams> checkpoints,
                                       const Sampler& sampler, std::uint64_t seed, int n_draws,
                                       int n_bins) {
  if (checkpoints.empty()) throw std::invalid_argument("ks_vs_coupling_report: no checkpoints");
  if (n_bins < 1) throw std::invalid_argument("ks_vs_coupling_report: n_bins must be >= 1");
  KsCouplingReport report;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const RbmParams& params = checkpoints[k];
    const std::uint64_t snap_seed = Rng::mix(seed, k);
    const SampleSet draws = draw_n(sampler, params, n_draws, Rng::mix(snap_seed, 1));
    const Reference ref = boltzmann_reference(params, n_draws, Rng::mix(snap_seed, 2));
    const KsResult ks = ks_two_sample(energies_under(params, draws), ref.samples.energies);
    report.rows.push_back({k, params.W.cwiseAbs().mean(), params.W.cwiseAbs().maxCoeff(),
                           ks.statistic, ks.p_value, ref.exact});
  }
  report.by_mean_coupling = bin_rows(report.rows, n_bins, &CouplingKsRow::mean_abs_coupling);
  report.by_max_coupling = bin_rows(report.rows, n_bins, &CouplingKsRow::max_abs_coupling);
  return report;
}

void write_ks_report_csv(const KsCouplingReport& report, std::ostream& out) {
  const auto old = out.precision(17);
  out << "checkpoint,mean_abs_coupling,max_abs_coupling,ks_statistic,p_value,reference\n";
  for (const auto& r : report.rows) {
    out << r.checkpoint << ',' << r.mean_abs_coupling << ',' << r.max_abs_coupling << ','
        << r.ks_statistic << ',' << r.p_value << ',' << (r.exact_reference ? "exact" : "gibbs_chain")
        << '\n';
  }
  out.precision(old);
}

}  // namespace rbmkit
