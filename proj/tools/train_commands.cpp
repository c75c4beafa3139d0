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

#include <rbmkit/datapipe.hpp>
#include <rbmkit/metrics.hpp>
#include <rbmkit/random.hpp>
#include <rbmkit/training.hpp>

#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>

namespace rbmkit::cli {

namespace fs = std::filesystem;

namespace {

struct TrainFlags {
  std::string algo = "discriminative";
  std::string rbm;
  int batch = 128;
  int epochs = 100;
  double lambda = 0.01;
  int switch_epoch = 0;
  double lr = 0.05;
  int cd_k = 1;
  double weight_clip = 0.0;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  std::string data;
  std::string out = "run";
  int checkpoint_every = 1;
  bool estimate_beta = false;
  double beta_0 = 3.0;
  int beta_samples = 1000;
  int beta_every = 0;
  SamplerFlags sampler;
};

void run_train(const TrainFlags& f, const CLI::App& cmd, std::ostream& log) {
  const auto [nv, nh] = parse_shape(f.rbm);
  const fs::path data(f.data);
  const CompressedDataset train_set = load_dataset((data / "train.dataset").string());
  const CompressedDataset test_set = load_dataset((data / "test.dataset").string());
  if (nv != train_set.n_feature_bits + 1) {
    throw std::runtime_error("RBM visible size " + std::to_string(nv) + " does not match the dataset: " +
                             std::to_string(train_set.n_feature_bits) + " feature bits + 1 class bit = " +
                             std::to_string(train_set.n_feature_bits + 1));
  }
  if (test_set.n_feature_bits != train_set.n_feature_bits) {
    throw std::runtime_error("train and test sets have different feature widths");
  }

  TrainConfig cfg;
  cfg.algorithm = parse_algorithm(f.algo);
  cfg.lambda = f.lambda;
  cfg.switch_epoch = f.switch_epoch;
  cfg.learning_rate = f.lr;
  cfg.batch_size = f.batch;
  cfg.n_epochs = f.epochs;
  cfg.cd_k = f.cd_k;
  if (f.weight_clip > 0.0) cfg.weight_clip = f.weight_clip;
  cfg.l2 = f.l2;
  cfg.rng_seed = f.seed;
  cfg.sampler = f.sampler.config(f.seed);
  cfg.beta_estimation = {f.estimate_beta, f.beta_0, f.beta_samples, f.beta_every};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path out = ensure_dir(f.out);
  const fs::path checkpoints = out / "checkpoints";
  if (f.checkpoint_every > 0) fs::create_directories(checkpoints);
  const std::unique_ptr<Sampler> sampler = f.sampler.make(nv, nh, f.seed);

  Rng init_rng(f.seed, 0x494e4954);
  const RbmParams initial = RbmParams::random_init(nv, nh, init_rng);
  if (f.checkpoint_every > 0) save_params(initial, (checkpoints / checkpoint_name(0)).string());

  std::string previous_algo;
  const TrainResult result = train(
      initial, train_set.visible_rows(), test_set.visible_rows(), cfg, sampler.get(),
      [&](const RbmParams& params, const EpochMetrics& m) {
        if (!previous_algo.empty() && m.algorithm != previous_algo) {
          log << "epoch " << m.epoch - 1 << ": switching from " << previous_algo << " to " << m.algorithm << '\n';
        }
        previous_algo = m.algorithm;
        log << "epoch " << m.epoch << " [" << m.algorithm << "] train " << m.train_accuracy << " test "
            << m.test_accuracy;
        if (m.beta_eff) log << " beta_eff " << *m.beta_eff;
        log << '\n';
        if (f.checkpoint_every > 0 && m.epoch % f.checkpoint_every == 0) {
          save_params(params, (checkpoints / checkpoint_name(m.epoch)).string());
        }
      });
  write_metrics_csv(result.metrics, (out / "metrics.csv").string());
  save_params(result.params, (out / "final.rbm").string());
  write_manifest(out, cmd, f.seed);
}

struct CompareFlags {
  std::vector<std::string> runs;
  std::vector<std::string> names;
  std::string reference;
  std::string out = "compare.csv";
};

std::string run_name(const fs::path& p) {
  const std::string stem = p.stem().string();
  if (stem == "metrics" && p.has_parent_path()) return p.parent_path().filename().string();
  return stem;
}

void run_compare(const CompareFlags& f, std::ostream& log) {
  if (f.runs.size() < 2) throw UsageError("compare needs at least two --runs");
  if (!f.names.empty() && f.names.size() != f.runs.size()) throw UsageError("--names must match --runs one to one");

  std::vector<std::string> names;
  std::vector<std::map<int, EpochMetrics>> runs;
  for (std::size_t k = 0; k < f.runs.size(); ++k) {
    names.push_back(f.names.empty() ? run_name(f.runs[k]) : f.names[k]);
    std::map<int, EpochMetrics> by_epoch;
    for (auto& m : read_metrics_csv(f.runs[k])) by_epoch[m.epoch] = m;
    runs.push_back(std::move(by_epoch));
  }
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
    throw UsageError("run names are not unique; pass --names");
  }
  std::size_t ref = 0;
  if (!f.reference.empty()) {
    const auto it = std::find(names.begin(), names.end(), f.reference);
    if (it == names.end()) throw UsageError("unknown reference run '" + f.reference + "'");
    ref = static_cast<std::size_t>(it - names.begin());
  }
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (std::size_t other = 0; other < runs.size(); ++other) {
      for (const auto& [epoch, m] : runs[other]) {
        if (!runs[k].count(epoch)) {
          throw std::runtime_error("epoch axis mismatch: run '" + names[k] + "' has no epoch " +
                                   std::to_string(epoch) + " (present in '" + names[other] + "')");
        }
      }
    }
  }

  std::ofstream out(f.out);
  if (!out) throw std::runtime_error("cannot write " + f.out);
  out.precision(17);
  out << "epoch,split";
  for (const auto& n : names) out << ',' << n;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k != ref) out << ",ratio_" << names[k];
  }
  out << '\n';
  for (const auto& [epoch, ref_metrics] : runs[ref]) {
    for (int split = 0; split < 2; ++split) {
      auto acc = [&](std::size_t k) {
        const EpochMetrics& m = runs[k].at(epoch);
        return split == 0 ? m.train_accuracy : m.test_accuracy;
      };
      out << epoch << ',' << (split == 0 ? "train" : "test");
      for (std::size_t k = 0; k < names.size(); ++k) out << ',' << acc(k);
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (k != ref) out << ',' << acc(k) / acc(ref);
      }
      out << '\n';
    }
  }
  log << "joined " << names.size() << " runs over " << runs[ref].size() << " epochs (reference " << names[ref]
      << ") -> " << f.out << '\n';
}

}  // namespace

void add_train_command(CLI::App& root, Context& ctx) {
  auto f = std::make_shared<TrainFlags>();
  CLI::App* cmd = root.add_subcommand("train", "Train an RBM classifier on a compressed dataset");
  cmd->add_option("--algo", f->algo, "cd | sampler_generative | discriminative | hybrid | annealed_hybrid")
      ->check(CLI::IsMember({"cd", "sampler_generative", "discriminative", "hybrid", "annealed_hybrid"}))
      ->capture_default_str();
  cmd->add_option("--rbm", f->rbm, "shape NxM; N must be feature bits + 1")->required();
  cmd->add_option("--batch", f->batch, "minibatch size")->capture_default_str();
  cmd->add_option("--epochs", f->epochs, "passes over the training set")->capture_default_str();
  cmd->add_option("--lambda", f->lambda, "hybrid mixing weight")->capture_default_str();
  cmd->add_option("--switch-epoch", f->switch_epoch, "annealed_hybrid: generative epochs before the switch")
      ->capture_default_str();
  cmd->add_option("--lr", f->lr, "learning rate")->capture_default_str();
  cmd->add_option("--cd-k", f->cd_k, "Gibbs sweeps for cd")->capture_default_str();
  cmd->add_option("--weight-clip", f->weight_clip, "clip |W| after each step (0: off)")->capture_default_str();
  cmd->add_option("--l2", f->l2, "L2 penalty on W")->capture_default_str();
  cmd->add_option("--seed", f->seed, "random seed")->capture_default_str();
  cmd->add_option("--data", f->data, "dataset directory")->required();
  cmd->add_option("--out", f->out, "output directory")->capture_default_str();
  cmd->add_option("--checkpoint-every", f->checkpoint_every, "epochs between checkpoints (0: none)")
      ->capture_default_str();
  cmd->add_flag("--estimate-beta", f->estimate_beta, "rescale sampler couplings by an estimated beta_eff");
  cmd->add_option("--beta-0", f->beta_0, "initial beta guess")->capture_default_str();
  cmd->add_option("--beta-samples", f->beta_samples, "draws per beta estimate")->capture_default_str();
  cmd->add_option("--beta-every", f->beta_every, "steps between estimates (0: once)")->capture_default_str();
  f->sampler.add_to(*cmd, "gibbs");
  cmd->callback([f, cmd, &ctx] { ctx.action = [f, cmd, &ctx] { run_train(*f, *cmd, ctx.out); }; });
}

void add_compare_command(CLI::App& root, Context& ctx) {
  auto f = std::make_shared<CompareFlags>();
  CLI::App* cmd = root.add_subcommand("compare", "Join metrics CSVs on epoch with accuracy ratios");
  cmd->add_option("--runs", f->runs, "metrics CSV files")->required()->check(CLI::ExistingFile);
  cmd->add_option("--names", f->names, "column names, one per run (default: file or directory name)");
  cmd->add_option("--reference", f->reference, "run the ratios are taken against (default: first)");
  cmd->add_option("--out", f->out, "output CSV")->capture_default_str();
  cmd->callback([f, &ctx] { ctx.action = [f, &ctx] { run_compare(*f, ctx.out); }; });
}

}  // namespace rbmkit::cli
