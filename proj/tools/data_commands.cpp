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

#include <rbmkit/baselines.hpp>
#include <rbmkit/datapipe.hpp>
#include <rbmkit/pgm.hpp>

#include <fstream>
#include <memory>
#include <ostream>

namespace rbmkit::cli {

namespace fs = std::filesystem;

namespace {

struct DatasetFlags {
  std::string source = "synth";
  int n = 2000;
  int side = 32;
  int bits = 64;
  std::uint64_t seed = 0;
  std::string out = "dataset";
  std::string dir;
  std::string manifest;
  int crop = 0;
  double fit_fraction = 0.5;
  double train_fraction = 0.5;
  int preview_rows = 50;
};

void run_dataset(const DatasetFlags& f, const CLI::App& cmd, std::ostream& log) {
  ImageSet images;
  if (f.source == "synth") {
    if (f.n < 2 || f.n % 2 != 0) throw UsageError("--n must be an even image count >= 2 (half per class)");
    images = synth_generate(f.n / 2, f.side, f.seed);
  } else {
    if (f.dir.empty()) throw UsageError("--source dir needs --dir");
    const std::string manifest = f.manifest.empty() ? (fs::path(f.dir) / "labels.csv").string() : f.manifest;
    images = ingest(f.dir, manifest, f.crop);
  }
  const BuiltDataset built = build_dataset(images, f.fit_fraction, f.bits, f.seed, f.train_fraction);

  const fs::path out = ensure_dir(f.out);
  save_pca(built.pca, (out / "pca.txt").string());
  save_quantizer(built.quantizer, (out / "quantizer.txt").string());
  save_dataset(built.train, (out / "train.dataset").string());
  save_dataset(built.test, (out / "test.dataset").string());

  const std::size_t rows = std::min<std::size_t>(f.preview_rows, built.train.size());
  const Raster preview = render_minibatch(built.train, 0, rows);
  write_pgm(preview.image, (out / "preview.pgm").string());
  std::ofstream(out / "preview.txt") << preview.caption << '\n';
  write_manifest(out, cmd, f.seed);

  log << "images " << images.size() << " (fit " << images.size() - built.train.size() - built.test.size()
      << ", train " << built.train.size() << ", test " << built.test.size() << "), " << f.bits
      << " feature bits -> " << out.string() << '\n';
}

struct BaselineFlags {
  std::string data;
  std::string out = "baselines";
  int epochs = 100;
  int batch = 128;
  double lr = 0.1;
  double l2 = 0.0;
  int trees = 100;
  int depth = 3;
  double gbt_lr = 0.1;
  std::uint64_t seed = 0;
};

void run_baselines(const BaselineFlags& f, const CLI::App& cmd, std::ostream& log) {
  const fs::path data(f.data);
  const CompressedDataset train = load_dataset((data / "train.dataset").string());
  const CompressedDataset test = load_dataset((data / "test.dataset").string());
  const fs::path out = ensure_dir(f.out);

  LogRegConfig lr;
  lr.learning_rate = f.lr;
  lr.batch_size = f.batch;
  lr.n_epochs = f.epochs;
  lr.l2 = f.l2;
  lr.rng_seed = f.seed;
  const LogRegResult logreg = logreg_train(train, test, lr);
  write_metrics_csv(logreg.metrics, (out / "logreg.csv").string());

  GbtConfig gbt;
  gbt.n_trees = f.trees;
  gbt.max_depth = f.depth;
  gbt.learning_rate = f.gbt_lr;
  const GbtResult trees = gbt_train(train, test, gbt);
  write_metrics_csv(trees.metrics, (out / "gbt.csv").string());
  write_manifest(out, cmd, f.seed);

  if (!logreg.metrics.empty()) {
    log << "logreg epoch " << logreg.metrics.back().epoch << ": train " << logreg.metrics.back().train_accuracy
        << " test " << logreg.metrics.back().test_accuracy << '\n';
  }
  if (!trees.metrics.empty()) {
    log << "gbt trees " << trees.metrics.back().epoch << ": train " << trees.metrics.back().train_accuracy
        << " test " << trees.metrics.back().test_accuracy << '\n';
  }
}

}  // namespace

void add_dataset_command(CLI::App& root, Context& ctx) {
  auto f = std::make_shared<DatasetFlags>();
  CLI::App* cmd = root.add_subcommand("dataset", "Build PCA/quantizer models and compressed train/test sets");
  cmd->add_option("--source", f->source, "synth | dir")->check(CLI::IsMember({"synth", "dir"}))->capture_default_str();
  cmd->add_option("--n", f->n, "total synthetic images (half per class)")->capture_default_str();
  cmd->add_option("--side", f->side, "synthetic image side in pixels")->check(CLI::Range(16, 4096))->capture_default_str();
  cmd->add_option("--bits", f->bits, "feature bits per row (multiple of 8)")
      ->check(CLI::Validator(
          [](std::string& v) {
            int b = 0;
            if (!CLI::detail::lexical_cast(v, b)) return "not an integer: " + v;
            return b > 0 && b % 8 == 0 ? std::string{} : "must be a positive multiple of 8, got " + v;
          },
          "MULTIPLE_OF_8"))
      ->capture_default_str();
  cmd->add_option("--seed", f->seed, "random seed")->capture_default_str();
  cmd->add_option("--out", f->out, "output directory")->capture_default_str();
  cmd->add_option("--dir", f->dir, "image directory for --source dir");
  cmd->add_option("--manifest", f->manifest, "label CSV (default <dir>/labels.csv)");
  cmd->add_option("--crop", f->crop, "centre crop side (0: keep square inputs)")->capture_default_str();
  cmd->add_option("--fit-fraction", f->fit_fraction, "share of images used to fit PCA and quantizer")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--train-fraction", f->train_fraction, "train share of the remaining images")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--preview-rows", f->preview_rows, "rows in the preview raster")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([f, cmd, &ctx] { ctx.action = [f, cmd, &ctx] { run_dataset(*f, *cmd, ctx.out); }; });
}

void add_baselines_command(CLI::App& root, Context& ctx) {
  auto f = std::make_shared<BaselineFlags>();
  CLI::App* cmd = root.add_subcommand("baselines", "Logistic regression and boosted trees on the same bits");
  cmd->add_option("--data", f->data, "dataset directory")->required();
  cmd->add_option("--out", f->out, "output directory")->capture_default_str();
  cmd->add_option("--epochs", f->epochs, "logistic regression epochs")->capture_default_str();
  cmd->add_option("--batch", f->batch, "logistic regression batch size")->capture_default_str();
  cmd->add_option("--lr", f->lr, "logistic regression learning rate")->capture_default_str();
  cmd->add_option("--l2", f->l2, "logistic regression L2 penalty")->capture_default_str();
  cmd->add_option("--trees", f->trees, "number of boosted trees")->capture_default_str();
  cmd->add_option("--depth", f->depth, "maximum tree depth")->capture_default_str();
  cmd->add_option("--gbt-lr", f->gbt_lr, "boosting learning rate")->capture_default_str();
  cmd->add_option("--seed", f->seed, "random seed")->capture_default_str();
  cmd->callback([f, cmd, &ctx] { ctx.action = [f, cmd, &ctx] { run_baselines(*f, *cmd, ctx.out); }; });
}

}  // namespace rbmkit::cli
