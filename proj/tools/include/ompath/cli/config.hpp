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
#include "ompath/systems.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ompath::cli {

enum class Command { kSolve, kSample, kVerify, kGeometry };
enum class SystemKind { kDoubleWell, kMaierStein, kNpz, kCustom };

std::string_view to_string(Command command);
std::string_view to_string(SystemKind kind);
std::optional<Command> command_from_string(std::string_view text);

struct SystemBlock {
  SystemKind kind = SystemKind::kDoubleWell;
  double sigma = 1.0;    // double_well
  double gamma = 1.0;    // maier_stein
  double epsilon = 0.1;  // maier_stein
  NpzParams npz;
  // custom: dx = (A x + b0) dt + S dW
  int dim = 0;
  Matrix drift_matrix;
  Vector drift_offset;
  Matrix diffusion;
};

struct ProblemBlock {
  Vector x0;
  Vector x_target;
  double t0 = 0.0;
  double tf = 1.0;
  double terminal_weight = 1.0;
};

struct SolverBlock {
  SolverConfig config;
  /// "zeros" or the path of a trajectory CSV whose theta columns seed θ⁰.
  std::string initial_control = "zeros";
};

struct McBlock {
  double dt = 1e-3;
  double delta = 0.1;
  std::int64_t attempts = 100000;
  std::int64_t trials = 100000;
  double tube_delta = 0.3;
  std::uint64_t seed = 1;
  ReferenceMethod reference = ReferenceMethod::kMinAction;
  int store_nodes = 201;
  unsigned threads = 0;
};

struct OutputBlock {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct GeometryBlock {
  std::vector<Vector> points;
};

struct RunConfig {
  Command command = Command::kSolve;
  SystemBlock system;
  ProblemBlock problem;
  SolverBlock solver;
  McBlock mc;
  OutputBlock output;
  GeometryBlock geometry;
  /// "section.key = value" for every field the text left unset.
  std::vector<std::string> applied_defaults;
};

/// Parses the sectioned `key = value` format (see the README). Throws
/// Error(ParseError) for malformed lines or values and Error(ValidationError)
/// for unknown or misplaced keys, missing fields and inconsistent values;
/// messages carry the line number or the field name. A command override
/// takes the place of the `command` key.
RunConfig parse_config(std::string_view text, std::optional<Command> command_override = std::nullopt);

RunConfig load_config(const std::filesystem::path& path,
                      std::optional<Command> command_override = std::nullopt);

/// Canonical text with every field explicit; parse_config inverts it.
std::string to_config_text(const RunConfig& config);

/// Field-wise equality, ignoring applied_defaults.
bool same_config(const RunConfig& a, const RunConfig& b);

/// Builds the SystemModel described by the block.
SystemModel build_system(const SystemBlock& block);

/// Closest candidate within edit distance 3, if any.
std::optional<std::string> nearest_key(std::string_view key, const std::vector<std::string>& candidates);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace ompath::cli
