/*
 Copyright 2026 The ompath Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "ompath/cli/config.hpp"
#include "ompath/cli/runner.hpp"

#include "ompath/error.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_flags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "Run configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--output-dir", flags.output_dir, "Directory for artifacts (overrides output.directory)");
  sub->add_option("--seed", flags.seed, "Random seed (overrides mc.seed)");
  sub->add_flag("--quiet", flags.quiet, "Suppress the run log");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ompath;
  CLI::App app{"Most probable transition paths of stochastic systems"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Solve for the most probable path"},
      {"sample", "Sample transitions by Monte Carlo"},
      {"verify", "Solve, sample and compare"},
      {"geometry", "Tabulate metric, connection, drift, divergence and curvature"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  std::ostringstream sink;
  std::ostream& log = flags.quiet ? static_cast<std::ostream&>(sink) : std::cout;
  try {
    cli::RunConfig config = cli::load_config(flags.config, cli::command_from_string(name));
    if (flags.output_dir) config.output.directory = *flags.output_dir;
    if (flags.seed) config.mc.seed = *flags.seed;
    for (const auto& line : config.applied_defaults) log << "default: " << line << "\n";
    const cli::RunOutcome outcome = cli::run(config, log);
    if (outcome.exit_code == cli::kExitNotConverged) {
      log << "finished without convergence (exit 2)\n";
    }
    return outcome.exit_code;
  } catch (const Error& e) {
    std::cerr << "ompath: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "ompath: unexpected failure: " << e.what() << "\n";
  }
  return cli::kExitError;
}
