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

#include "ompath/monte_carlo.hpp"
#include "ompath/msa_solver.hpp"
#include "ompath/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ompath::cli {

/// `%.17g`, enough digits to read back the same double.
std::string format_double(double value);

/// Header `t,x1..xd[,p1..pd][,theta1..thetad]`, one row per node. Costate and
/// control columns appear when the trajectory carries them.
std::string trajectory_csv(const Trajectory& traj);

/// Inverse of trajectory_csv. Throws ParseError naming the line.
Trajectory parse_trajectory_csv(std::string_view text);

Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Long format `path,attempt,t,x1..xd`, paths in attempt order.
std::string ensemble_csv(const TransitionEnsemble& ensemble);

/// Writes through a sibling temp file and a rename, creating parent
/// directories. Throws IoError with the path.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text(const std::filesystem::path& path);

nlohmann::json iteration_json(const IterationRecord& record);

/// Solver report fields shared by solve and verify.
nlohmann::json solver_report_json(const SolverReport& report);

/// Pretty-printed with a trailing newline.
std::string dump_json(const nlohmann::json& value);

}  // namespace ompath::cli
