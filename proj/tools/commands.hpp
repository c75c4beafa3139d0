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

#include <CLI11.hpp>

#include <functional>
#include <iosfwd>

namespace rbmkit::cli {

/// Each command registers its flags and, once parsed, stores the work to do
/// in `action`; run() executes it after parsing succeeds.
struct Context {
  std::ostream& out;
  std::function<void()> action;
};

void add_dataset_command(CLI::App& root, Context& ctx);
void add_train_command(CLI::App& root, Context& ctx);
void add_audit_command(CLI::App& root, Context& ctx);
void add_compare_command(CLI::App& root, Context& ctx);
void add_baselines_command(CLI::App& root, Context& ctx);

}  // namespace rbmkit::cli
