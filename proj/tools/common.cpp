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

#include "common.hpp"

#include <rbmkit/datapipe.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

namespace rbmkit::cli {

namespace fs = std::filesystem;

void SamplerFlags::add_to(CLI::App& app, const std::string& default_kind) {
  kind = default_kind;
  app.add_option("--sampler", kind, "gibbs | simulated_annealing | exact | chimera")
      ->check(CLI::IsMember({"gibbs", "simulated_annealing", "exact", "chimera"}))
      ->capture_default_str();
  app.add_option("--samples", n_samples, "draws per sampler call")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--burn-in", burn_in, "Gibbs burn-in sweeps")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--post-sweeps", post_sweeps, "Gibbs sweeps after each anneal")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--beta-start", beta_start, "annealing start inverse temperature")->capture_default_str();
  app.add_option("--beta-end", beta_end, "annealing end inverse temperature")->capture_default_str();
  app.add_option("--sweeps", sweeps, "annealing sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--chain-strength", chain_strength, "chimera chain strength (0: model default)")
      ->capture_default_str();
}

SamplerConfig SamplerFlags::config(std::uint64_t seed) const {
  SamplerConfig c;
  c.kind = parse_sampler_kind(kind);
  c.n_samples = n_samples;
  c.burn_in_sweeps = burn_in;
  c.gibbs_postprocess_sweeps = post_sweeps;
  c.sa = {beta_start, beta_end, sweeps};
  c.rng_seed = seed;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::unique_ptr<Sampler> SamplerFlags::make(int n_visible, int n_hidden, std::uint64_t seed) const {
  ChimeraOptions options;
  options.chain_strength = chain_strength;
  return make_sampler(config(seed), n_visible, n_hidden, options);
}

std::pair<int, int> parse_shape(const std::string& text) {
  static const std::regex shape(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, shape)) throw UsageError("expected NxM for the RBM shape, got '" + text + "'");
  const int nv = std::stoi(m[1]);
  const int nh = std::stoi(m[2]);
  if (nv < 1 || nh < 1) throw UsageError("RBM layers must be non-empty, got '" + text + "'");
  return {nv, nh};
}

std::string checkpoint_name(int epoch) {
  std::ostringstream s;
  s << "epoch_" << std::setw(4) << std::setfill('0') << epoch << ".rbm";
  return s.str();
}

std::vector<Checkpoint> load_checkpoints(const std::vector<std::string>& inputs) {
  static const std::regex name(R"(epoch_(\d+)\.rbm)");
  std::vector<Checkpoint> out;
  auto add = [&](const fs::path& p) {
    std::smatch m;
    const std::string file = p.filename().string();
    const int epoch = std::regex_match(file, m, name) ? std::stoi(m[1]) : static_cast<int>(out.size()) + 1;
    out.push_back({epoch, p, load_params(p.string())});
  };
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        std::smatch m;
        const std::string file = entry.path().filename().string();
        if (std::regex_match(file, m, name)) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      for (const auto& f : found) add(f);
    } else if (fs::exists(p)) {
      add(p);
    } else {
      throw std::runtime_error("checkpoint input '" + input + "' does not exist");
    }
  }
  if (out.empty()) throw std::runtime_error("no checkpoints found (expected epoch_NNNN.rbm files)");
  std::stable_sort(out.begin(), out.end(), [](const Checkpoint& a, const Checkpoint& b) { return a.epoch < b.epoch; });
  return out;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string command_path(const CLI::App& app) {
  std::string name = app.get_name();
  for (const CLI::App* parent = app.get_parent(); parent && parent->get_parent(); parent = parent->get_parent()) {
    name = parent->get_name() + " " + name;
  }
  return name;
}

}  // namespace

void write_manifest(const fs::path& dir, const CLI::App& command, std::uint64_t seed) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
  for (const auto& f : files) {
    const std::string bytes = read_file(f);
    artifacts.push_back({{"path", fs::relative(f, dir).generic_string()},
                         {"bytes", bytes.size()},
                         {"fnv1a64", fingerprint_bytes(bytes)}});
  }
  nlohmann::ordered_json manifest;
  manifest["tool"] = "rbmkit";
  manifest["version"] = RBMKIT_VERSION;
  manifest["command"] = command_path(command);
  manifest["seed"] = seed;
  manifest["config"] = command.config_to_str(true, false);
  manifest["artifacts"] = artifacts;
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

fs::path ensure_dir(const std::string& path) {
  const fs::path p(path);
  fs::create_directories(p);
  return p;
}

}  // namespace rbmkit::cli
