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

#include "cli.hpp"

#include "commands.hpp"
#include "common.hpp"

#include <rbmkit/error.hpp>

#include <ostream>

namespace rbmkit::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Restricted Boltzmann machine training and sampler thermometry", "rbmkit");
  app.set_version_flag("--version", RBMKIT_VERSION);
  app.set_config("--config", "", "INI file with [command] sections mirroring the flag names; flags override it");
  app.require_subcommand(1);

  Context ctx{out, {}};
  add_dataset_command(app, ctx);
  add_train_command(app, ctx);
  add_audit_command(app, ctx);
  add_compare_command(app, ctx);
  add_baselines_command(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      return app.exit(e, out, err);
    }
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (ctx.action) ctx.action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rbmkit::cli
