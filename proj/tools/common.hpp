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

#include <rbmkit/chimera.hpp>
#include <rbmkit/rbm.hpp>
#include <rbmkit/samplers.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace rbmkit::cli {

/// Bad flag combinations found after parsing; reported with exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Negative-phase sampler flags shared by train and the audits.
struct SamplerFlags {
  std::string kind = "gibbs";
  int n_samples = 100;
  int burn_in = 100;
  int post_sweeps = 2;
  double beta_start = 0.1;
  double beta_end = 1.0;
  int sweeps = 100;
  double chain_strength = 0.0;

  void add_to(CLI::App& app, const std::string& default_kind);
  SamplerConfig config(std::uint64_t seed) const;
  std::unique_ptr<Sampler> make(int n_visible, int n_hidden, std::uint64_t seed) const;
};

/// "12x12" -> (12, 12).
std::pair<int, int> parse_shape(const std::string& text);

struct Checkpoint {
  int epoch = 0;
  std::filesystem::path path;
  RbmParams params;
};

std::string checkpoint_name(int epoch);
/// A directory of epoch_NNNN.rbm files (sorted by epoch) or explicit files.
/// Throws when nothing is found.
std::vector<Checkpoint> load_checkpoints(const std::vector<std::string>& inputs);

/// manifest.json: command, options snapshot, seed and a hash of every file
/// written into the directory (manifest excluded). No timestamps, so
/// identical runs produce identical manifests.
void write_manifest(const std::filesystem::path& dir, const CLI::App& command,
                    std::uint64_t seed);

std::filesystem::path ensure_dir(const std::string& path);

}  // namespace rbmkit::cli
