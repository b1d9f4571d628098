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

#include "ompath/control_problem.hpp"
#include "ompath/trajectory.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace ompath {

struct SolverConfig {
  int n_nodes = 201;
  int max_iterations = 500;
  double damping_eta = 0.5;
  double cost_tolerance = 1e-8;
  double stationarity_tolerance = 1e-6;
  /// n_nodes x d starting controls; zeros when empty.
  Matrix initial_control;

  /// Throws InvalidParams on a bad field.
  void validate() const;
};

/// Both tolerance reasons mean converged; they name the criterion met last.
enum class StopReason {
  kCostTolerance,
  kStationarityTolerance,
  kMaxIterations,
  kDiverged,
};

std::string_view to_string(StopReason reason);
std::optional<StopReason> stop_reason_from_string(std::string_view text);

/// One accepted iterate. k = 0 is the initial guess.
struct IterationRecord {
  int k = 0;
  double cost = 0.0;
  double grad_norm = 0.0;       // max over nodes of |∇_θH|
  double endpoint_error = 0.0;  // |x(tf) − x_target|
  double eta = 0.0;             // step that produced this iterate (0 for k = 0)

  bool operator==(const IterationRecord&) const = default;
};

struct SolverReport {
  bool converged = false;
  StopReason stop_reason = StopReason::kMaxIterations;
  std::vector<IterationRecord> iterations;
  Trajectory solution;
  int rejected_steps = 0;
  /// No step down to the smallest damping lowered the cost; reported as
  /// max_iter since further iterations could not move the iterate.
  bool stalled = false;
};

/// Smallest damping the line search will try.
inline constexpr double kMinDamping = 1e-3;

/// RK4 for ẋ = b̃(x) + σ(x)θ(t) from x0 on the uniform grid implied by
/// `controls.rows()`, θ linear between nodes. Throws NumericalBlowup once a
/// component leaves [−1e8, 1e8].
Matrix forward_sweep(const ControlProblem& problem, const Matrix& controls);

/// RK4 for ṗ = −∇ₓH backward from p(tf) = −∇Φ(x(tf)), with x and θ linear
/// between nodes.
Matrix backward_sweep(const ControlProblem& problem, const Matrix& states, const Matrix& controls);

/// argmax_θ H(x, p, θ). Closed form σᵀp − c when the running cost is the
/// Onsager-Machlup one; backtracking gradient ascent otherwise, raising
/// AscentStall after 1000 steps above `tolerance`.
Vector maximize_hamiltonian(const ControlProblem& problem, const Vector& x, const Vector& p,
                            double tolerance = 1e-6);

/// Damped successive approximations. Converged means max |∇_θH| within the
/// stationarity tolerance together with a relative cost change below the cost
/// tolerance. A trial is accepted when J does not increase, or when it rises
/// by at most 1e-12 while max |∇_θH| falls. A blow-up at the smallest damping
/// ends the run as diverged.
SolverReport msa_solve(const ControlProblem& problem, const SolverConfig& config);

/// max over interior nodes of |d/dt ∂L/∂ż − ∂L/∂z|, all derivatives by
/// central differences. Needs n >= 5.
double el_residual(const SystemModel& system, const Trajectory& traj);

/// max_t H − min_t H along a trajectory with states, costates and controls.
double hamiltonian_constancy(const ControlProblem& problem, const Trajectory& traj);

}  // namespace ompath
