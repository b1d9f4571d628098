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

#include "ompath/control_problem.hpp"

#include "ompath/error.hpp"
#include "ompath/geometry.hpp"

#include <sstream>

namespace ompath {

namespace {

constexpr double kCostStep = 1e-4;

double cost_step(double xi) { return kCostStep * std::max(1.0, std::abs(xi)); }

void check_size(const Vector& v, int d, const char* what) {
  if (v.size() != d) {
    std::ostringstream os;
    os << what << " has dimension " << v.size() << ", expected " << d;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

double om_running_cost(const OmTerms& t, const Vector& theta) {
  return 0.5 * ((theta + t.drift_correction).squaredNorm() + t.divergence - t.curvature / 6.0);
}

// ∇ₓ of pᵀ(b̃ + σθ).
Vector flow_gradient(const SystemModel& system, const Vector& x, const Vector& p,
                     const Vector& theta) {
  const int d = system.dim();
  Vector g = system.drift_jacobian(x).transpose() * p;
  const Tensor3 ds = system.diffusion_partials(x);
  for (int l = 0; l < d; ++l) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) acc += p[i] * ds(i, j, l) * theta[j];
    g[l] += acc;
  }
  return g;
}

Vector running_cost_gradient_fd(const ControlProblem& problem, const Vector& x,
                                const Vector& theta) {
  const int d = problem.dim();
  Vector g(d);
  Vector xp = x;
  Vector xm = x;
  for (int l = 0; l < d; ++l) {
    const double h = cost_step(x[l]);
    xp[l] = x[l] + h;
    xm[l] = x[l] - h;
    g[l] = (running_cost(problem, xp, theta) - running_cost(problem, xm, theta)) / (2.0 * h);
    xp[l] = x[l];
    xm[l] = x[l];
  }
  return g;
}

Vector running_cost_control_gradient_fd(const ControlProblem& problem, const Vector& x,
                                        const Vector& theta) {
  const int d = problem.dim();
  Vector g(d);
  Vector tp = theta;
  Vector tm = theta;
  for (int j = 0; j < d; ++j) {
    const double h = fd_step(theta[j]);
    tp[j] = theta[j] + h;
    tm[j] = theta[j] - h;
    g[j] = (problem.custom_running_cost(x, tp) - problem.custom_running_cost(x, tm)) / (2.0 * h);
    tp[j] = theta[j];
    tm[j] = theta[j];
  }
  return g;
}

}  // namespace

ControlProblem assemble_problem(SystemModel system, Vector x0, Vector x_target, double t0, double tf,
                                double terminal_weight) {
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0)) {
    std::ostringstream os;
    os << "horizon needs tf > t0, got t0 = " << t0 << ", tf = " << tf;
    throw Error(ErrorCode::kInvalidHorizon, os.str());
  }
  const int d = system.dim();
  check_size(x0, d, "x0");
  check_size(x_target, d, "x_target");
  if (!x0.allFinite() || !x_target.allFinite()) {
    throw Error(ErrorCode::kInvalidParams, "endpoints must be finite");
  }
  if (!(terminal_weight >= 0.0) || !std::isfinite(terminal_weight)) {
    std::ostringstream os;
    os << "terminal weight must be finite and nonnegative, got " << terminal_weight;
    throw Error(ErrorCode::kInvalidParams, os.str());
  }
  return ControlProblem{std::move(system), std::move(x0), std::move(x_target), t0, tf,
                        terminal_weight, {}, {}, {}};
}

Vector dynamics(const ControlProblem& problem, const Vector& x, const Vector& theta) {
  check_size(theta, problem.dim(), "control");
  return problem.system.drift(x) + problem.system.diffusion(x) * theta;
}

double terminal_cost(const ControlProblem& problem, const Vector& x) {
  if (problem.custom_terminal_cost) return problem.custom_terminal_cost(x);
  check_size(x, problem.dim(), "state");
  const double r = (x - problem.x_target).squaredNorm();
  return problem.terminal_weight * r / (r + 1.0);
}

Vector terminal_cost_gradient(const ControlProblem& problem, const Vector& x) {
  if (problem.custom_terminal_gradient) return problem.custom_terminal_gradient(x);
  check_size(x, problem.dim(), "state");
  const Vector diff = x - problem.x_target;
  const double r1 = diff.squaredNorm() + 1.0;
  return problem.terminal_weight * 2.0 / (r1 * r1) * diff;
}

double running_cost(const ControlProblem& problem, const Vector& x, const Vector& theta) {
  check_size(theta, problem.dim(), "control");
  if (problem.custom_running_cost) return problem.custom_running_cost(x, theta);
  return om_running_cost(om_terms(problem.system, x), theta);
}

double hamiltonian(const ControlProblem& problem, const Vector& x, const Vector& p,
                   const Vector& theta) {
  check_size(p, problem.dim(), "costate");
  return p.dot(dynamics(problem, x, theta)) - running_cost(problem, x, theta);
}

HamiltonianGradients hamiltonian_gradients(const ControlProblem& problem, const Vector& x,
                                           const Vector& p, const Vector& theta) {
  const SystemModel& system = problem.system;
  check_size(p, problem.dim(), "costate");
  check_size(theta, problem.dim(), "control");
  HamiltonianGradients g;
  g.dx = flow_gradient(system, x, p, theta);
  const Matrix s = system.diffusion(x);

  if (problem.custom_running_cost) {
    g.dx -= running_cost_gradient_fd(problem, x, theta);
    g.dtheta = s.transpose() * p - running_cost_control_gradient_fd(problem, x, theta);
    return g;
  }

  const OmTerms t = om_terms(system, x);
  const Vector shifted = theta + t.drift_correction;
  g.dtheta = s.transpose() * p - shifted;
  if (const AnalyticOmTerms* analytic = system.analytic_om_terms()) {
    const OmTermGradients dt = analytic->gradients(x);
    g.dx -= dt.drift_correction_jacobian.transpose() * shifted + 0.5 * dt.divergence_gradient -
            dt.curvature_gradient / 12.0;
  } else {
    g.dx -= running_cost_gradient_fd(problem, x, theta);
  }
  return g;
}

double total_cost(const ControlProblem& problem, const Trajectory& traj) {
  traj.validate();
  const int n = traj.nodes();
  if (!traj.has_controls()) {
    throw Error(ErrorCode::kInvalidArgument, "total cost needs a control grid");
  }
  const double h = traj.spacing();
  double acc = 0.0;
  if (h != 0.0) {
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += w * running_cost(problem, traj.states.row(i).transpose(),
                              traj.controls.row(i).transpose());
    }
  }
  return acc * h + terminal_cost(problem, traj.states.row(n - 1).transpose());
}

}  // namespace ompath
