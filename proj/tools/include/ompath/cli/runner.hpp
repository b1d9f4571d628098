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

#pragma once

#include "ompath/cli/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <ostream>

namespace ompath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> artifacts;
};

/// Executes the command in `config`, writing artifacts under
/// config.output.directory. Library errors propagate as Error; non-convergence
/// and empty ensembles give exit code 2 with artifacts still written.
RunOutcome run(const RunConfig& config, std::ostream& log);

/// V, Γ, b, div b and R at one point.
nlohmann::json geometry_json(const SystemModel& system, const Vector& x);

/// Line from x0 to x_target on `nodes` uniform nodes.
Trajectory straight_line(const Vector& x0, const Vector& x_target, double t0, double tf, int nodes);

}  // namespace ompath::cli
