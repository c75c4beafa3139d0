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

#include "commands.hpp"
#include "common.hpp"

#include <rbmkit/error.hpp>
#include <rbmkit/random.hpp>
#include <rbmkit/thermometry.hpp>

#include <cmath>
#include <deque>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>

namespace rbmkit::cli {

namespace fs = std::filesystem;

namespace {

struct AuditFlags {
  std::vector<std::string> checkpoints;
  std::string out;
  std::uint64_t seed = 0;
  SamplerFlags sampler;
};

std::ofstream open_csv(const std::string& path) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(10);
  return out;
}

void add_common(CLI::App& cmd, AuditFlags& f, const std::string& default_out) {
  f.out = default_out;
  cmd.add_option("--checkpoints", f.checkpoints, "checkpoint directory or .rbm files")->required();
  cmd.add_option("--out", f.out, "output CSV")->capture_default_str();
  cmd.add_option("--seed", f.seed, "random seed")->capture_default_str();
  f.sampler.add_to(cmd, "simulated_annealing");
  f.sampler.n_samples = 1000;
}

struct BetaFlags : AuditFlags {
  int every = 1;
  double beta_0 = 3.0;
  int n = 1000;
  int window = 50;
};

void run_beta(const BetaFlags& f, std::ostream& log) {
  const auto cps = load_checkpoints(f.checkpoints);
  std::ofstream out = open_csv(f.out);
  out << "step,epoch,beta_eff,rolling_mean,sigma,x,n_bins_used,status\n";
  std::deque<double> recent;
  double prior = f.beta_0;
  for (std::size_t k = 0; k < cps.size(); k += f.every) {
    const auto& cp = cps[k];
    const auto sampler = f.sampler.make(cp.params.n_visible(), cp.params.n_hidden(), f.seed);
    out << k << ',' << cp.epoch << ',';
    try {
      const TempEstimate e = estimate_beta(cp.params, *sampler, prior, f.n, Rng::mix(f.seed, k));
      recent.push_back(e.beta_eff);
      if (static_cast<int>(recent.size()) > f.window) recent.pop_front();
      const double mean = std::accumulate(recent.begin(), recent.end(), 0.0) / recent.size();
      if (e.beta_eff > 0.0) prior = e.beta_eff;
      out << e.beta_eff << ',' << mean << ',' << e.sigma << ',' << e.x << ',' << e.n_bins_used << ",ok\n";
    } catch (const EstimationError& e) {
      out << ",,,,,failed: " << e.what() << '\n';
    }
  }
  log << "beta estimates for " << (cps.size() + f.every - 1) / f.every << " checkpoints -> " << f.out << '\n';
}

struct KsFlags : AuditFlags {
  int draws = 1000;
  int bins = 10;
};

void run_ks(const KsFlags& f, std::ostream& log) {
  const auto cps = load_checkpoints(f.checkpoints);
  std::vector<RbmParams> params;
  for (const auto& cp : cps) params.push_back(cp.params);
  const auto sampler = f.sampler.make(params[0].n_visible(), params[0].n_hidden(), f.seed);
  const KsCouplingReport report = ks_vs_coupling_report(params, *sampler, f.seed, f.draws, f.bins);
  std::ofstream out = open_csv(f.out);
  write_ks_report_csv(report, out);
  log << "KS vs coupling over " << cps.size() << " checkpoints -> " << f.out << '\n';
}

struct StepsFlags : AuditFlags {
  int max_sweeps = 100;
  int trials = 5;
  int reference = 1000;
};

void run_steps(const StepsFlags& f, std::ostream& log) {
  const auto cps = load_checkpoints(f.checkpoints);
  std::ofstream out = open_csv(f.out);
  out << "epoch,mean_steps,stderr,never_reached,trials,reference\n";
  for (const auto& cp : cps) {
    const auto sampler = f.sampler.make(cp.params.n_visible(), cp.params.n_hidden(), f.seed);
    std::vector<double> steps;
    int never = 0;
    bool exact = true;
    for (int t = 0; t < f.trials; ++t) {
      const std::uint64_t trial_seed = Rng::mix(Rng::mix(f.seed, cp.epoch), t);
      const Reference ref = boltzmann_reference(cp.params, f.reference, Rng::mix(trial_seed, 0));
      exact = exact && ref.exact;
      const SampleSet seeds = sampler->sample(cp.params, Rng::mix(trial_seed, 1));
      Rng gibbs(trial_seed, 2);
      const int s = steps_to_boltzmann(cp.params, seeds, ref.samples, f.max_sweeps, gibbs);
      if (s > f.max_sweeps) ++never;
      steps.push_back(s);
    }
    const double mean = std::accumulate(steps.begin(), steps.end(), 0.0) / steps.size();
    double var = 0.0;
    for (double s : steps) var += (s - mean) * (s - mean);
    const double stderr_ = steps.size() > 1 ? std::sqrt(var / (steps.size() - 1) / steps.size()) : 0.0;
    out << cp.epoch << ',' << mean << ',' << stderr_ << ',' << never << ',' << f.trials << ','
        << (exact ? "exact" : "gibbs_chain") << '\n';
  }
  log << "steps to Boltzmann for " << cps.size() << " checkpoints -> " << f.out << '\n';
}

struct AdvantageFlags : AuditFlags {
  std::string baseline = "zeros";
  int max_sweeps = 100;
  int reference = 1000;
};

void run_advantage(const AdvantageFlags& f, std::ostream& log) {
  const auto cps = load_checkpoints(f.checkpoints);
  std::vector<RbmParams> params;
  for (const auto& cp : cps) params.push_back(cp.params);
  const int nv = params[0].n_visible(), nh = params[0].n_hidden();
  const auto a = f.sampler.make(nv, nh, f.seed);
  std::unique_ptr<Sampler> b;
  if (f.baseline == "zeros") {
    b = std::make_unique<ConstantSampler>(f.sampler.n_samples);
  } else if (f.baseline == "random") {
    b = std::make_unique<RandomBitstringSampler>(f.sampler.n_samples);
  } else {
    SamplerFlags other = f.sampler;
    other.kind = f.baseline;
    b = other.make(nv, nh, f.seed);
  }
  const SeedAdvantage adv = seed_advantage(params, *a, *b, f.seed, f.max_sweeps, f.reference);
  std::ofstream out = open_csv(f.out);
  out << "epoch,steps_a,steps_b\n";
  for (std::size_t k = 0; k < cps.size(); ++k) out << cps[k].epoch << ',' << adv.steps_a[k] << ',' << adv.steps_b[k] << '\n';
  out << "# sampler_a=" << a->name() << " sampler_b=" << b->name() << " mean_a=" << adv.mean_a
      << " mean_b=" << adv.mean_b << " ratio=" << adv.ratio << " a_fewer=" << adv.a_fewer
      << " b_fewer=" << adv.b_fewer << " ties=" << adv.ties;
  if (adv.p_a_fewer) {
    out << " p_a_fewer=" << adv.p_a_fewer->p_hat << " ci95=[" << adv.p_a_fewer->lower << ','
        << adv.p_a_fewer->upper << ']';
  } else {
    out << " p_a_fewer=undefined (all ties)";
  }
  out << '\n';
  log << a->name() << " vs " << b->name() << ": ratio of mean steps " << adv.ratio;
  if (adv.p_a_fewer) {
    log << ", P(a needs fewer) " << adv.p_a_fewer->p_hat << " [" << adv.p_a_fewer->lower << ", "
        << adv.p_a_fewer->upper << "]";
  } else {
    log << ", all ties";
  }
  log << '\n';
}

}  // namespace

void add_audit_command(CLI::App& root, Context& ctx) {
  CLI::App* audit = root.add_subcommand("audit", "Thermometry audits over training checkpoints");
  audit->require_subcommand(1);

  auto beta = std::make_shared<BetaFlags>();
  CLI::App* b = audit->add_subcommand("beta", "Effective-temperature estimates per checkpoint");
  add_common(*b, *beta, "beta.csv");
  b->add_option("--every", beta->every, "use every k-th checkpoint")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--beta-0", beta->beta_0, "initial beta guess")->capture_default_str();
  b->add_option("--n", beta->n, "draws per estimate")->capture_default_str();
  b->add_option("--window", beta->window, "rolling-mean window")->check(CLI::PositiveNumber)->capture_default_str();
  b->callback([beta, &ctx] { ctx.action = [beta, &ctx] { run_beta(*beta, ctx.out); }; });

  auto ks = std::make_shared<KsFlags>();
  CLI::App* k = audit->add_subcommand("ks", "KS statistic against Boltzmann, binned by coupling size");
  add_common(*k, *ks, "ks.csv");
  k->add_option("--draws", ks->draws, "draws per side")->capture_default_str();
  k->add_option("--bins", ks->bins, "coupling bins")->capture_default_str();
  k->callback([ks, &ctx] { ctx.action = [ks, &ctx] { run_ks(*ks, ctx.out); }; });

  auto steps = std::make_shared<StepsFlags>();
  CLI::App* s = audit->add_subcommand("steps", "Gibbs sweeps until seeds pass the KS test, per checkpoint");
  add_common(*s, *steps, "steps.csv");
  s->add_option("--max-sweeps", steps->max_sweeps, "sweep limit")->capture_default_str();
  s->add_option("--trials", steps->trials, "repetitions per checkpoint")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--reference", steps->reference, "reference draws")->capture_default_str();
  s->callback([steps, &ctx] { ctx.action = [steps, &ctx] { run_steps(*steps, ctx.out); }; });

  auto adv = std::make_shared<AdvantageFlags>();
  CLI::App* a = audit->add_subcommand("seed-advantage", "Compare two seed sources by steps to Boltzmann");
  add_common(*a, *adv, "seed_advantage.csv");
  a->add_option("--baseline", adv->baseline, "zeros | random | gibbs | simulated_annealing | exact | chimera")
      ->check(CLI::IsMember({"zeros", "random", "gibbs", "simulated_annealing", "exact", "chimera"}))
      ->capture_default_str();
  a->add_option("--max-sweeps", adv->max_sweeps, "sweep limit")->capture_default_str();
  a->add_option("--reference", adv->reference, "reference draws")->capture_default_str();
  a->callback([adv, &ctx] { ctx.action = [adv, &ctx] { run_advantage(*adv, ctx.out); }; });
}

}  // namespace rbmkit::cli
