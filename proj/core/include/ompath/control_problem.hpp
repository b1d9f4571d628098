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

#include "ompath/system_model.hpp"
#include "ompath/trajectory.hpp"

#include <functional>

namespace ompath {

using RunningCost = std::function<double(const Vector& x, const Vector& theta)>;
using TerminalCost = std::function<double(const Vector& x)>;

/// Fixed-time Bolza problem
///
///   minimize  J[θ] = ∫ L(x, θ) dt + λ Φ(x(tf)),   ẋ = b̃(x) + σ(x)θ,  x(t0) = x0,
///
/// with L the control-form Onsager-Machlup Lagrangian and
/// Φ(x) = r/(r + 1), r = |x − x_target|².
struct ControlProblem {
  SystemModel system;
  Vector x0;
  Vector x_target;
  double t0 = 0.0;
  double tf = 1.0;
  double terminal_weight = 1.0;

  /// Replaces the Onsager-Machlup running cost. The Hamiltonian is then no
  /// longer known to be quadratic in θ and is maximized by gradient ascent.
  RunningCost custom_running_cost;
  /// Replaces λΦ. Both callbacks must be set together.
  TerminalCost custom_terminal_cost;
  VectorField custom_terminal_gradient;

  int dim() const noexcept { return system.dim(); }
  bool quadratic_in_control() const noexcept { return !custom_running_cost; }
};

/// Throws InvalidHorizon unless tf > t0, DimensionMismatch for endpoint
/// sizes, InvalidParams for a negative or non-finite weight.
ControlProblem assemble_problem(SystemModel system, Vector x0, Vector x_target, double t0, double tf,
                                double terminal_weight = 1.0);

/// b̃(x) + σ(x)θ.
Vector dynamics(const ControlProblem& problem, const Vector& x, const Vector& theta);

double terminal_cost(const ControlProblem& problem, const Vector& x);
Vector terminal_cost_gradient(const ControlProblem& problem, const Vector& x);

/// ½[(σθ + Δ)ᵀV(σθ + Δ) + div b − R/6], unless overridden.
double running_cost(const ControlProblem& problem, const Vector& x, const Vector& theta);

/// H = pᵀ f(x, θ) − L(x, θ).
double hamiltonian(const ControlProblem& problem, const Vector& x, const Vector& p,
                   const Vector& theta);

struct HamiltonianGradients {
  Vector dx;
  Vector dtheta;
};

/// ∇ₓH from the system's analytic derivatives (central differences of the
/// running cost when no closed forms are attached) and ∇_θH = σᵀp − (θ + c)
/// in closed form, c = σ⁻¹(b̃ − b).
HamiltonianGradients hamiltonian_gradients(const ControlProblem& problem, const Vector& x,
                                           const Vector& p, const Vector& theta);

/// Trapezoidal ∫L plus the terminal cost at the last node.
/// Requires states and controls; throws DegenerateGrid.
double total_cost(const ControlProblem& problem, const Trajectory& traj);

}  // namespace ompath
