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

#include "ompath/msa_solver.hpp"

#include "ompath/error.hpp"
#include "ompath/geometry.hpp"

#include <limits>
#include <sstream>

namespace ompath {

namespace {

constexpr double kBlowup = 1e8;
constexpr int kAscentSteps = 1000;
constexpr double kCostSlack = 1e-12;

void check_bounded(const Vector& v, const char* what, int node) {
  if (!v.allFinite() || v.cwiseAbs().maxCoeff() > kBlowup) {
    std::ostringstream os;
    os << what << " left [-1e8, 1e8] near node " << node;
    throw Error(ErrorCode::kNumericalBlowup, os.str());
  }
}

struct Sweep {
  Matrix states;
  Matrix costates;
  Matrix best_controls;  // nodal argmax of H
  double cost = 0.0;
  double grad_norm = 0.0;
};

Trajectory make_trajectory(const ControlProblem& problem, const Matrix& states,
                           const Matrix& controls) {
  Trajectory traj;
  traj.times = uniform_grid(problem.t0, problem.tf, static_cast<int>(controls.rows()));
  traj.states = states;
  traj.controls = controls;
  return traj;
}

// Costates, nodal maximizers and stationarity for a known forward solution.
void complete_sweep(const ControlProblem& problem, const Matrix& controls, Sweep& sweep,
                    double tolerance) {
  sweep.costates = backward_sweep(problem, sweep.states, controls);
  const int n = static_cast<int>(controls.rows());
  sweep.best_controls.resize(n, problem.dim());
  sweep.grad_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = sweep.states.row(i).transpose();
    const Vector p = sweep.costates.row(i).transpose();
    const Vector theta = controls.row(i).transpose();
    sweep.best_controls.row(i) = maximize_hamiltonian(problem, x, p, tolerance).transpose();
    const double g = problem.quadratic_in_control()
                         ? (sweep.best_controls.row(i) - controls.row(i)).norm()
                         : hamiltonian_gradients(problem, x, p, theta).dtheta.norm();
    sweep.grad_norm = std::max(sweep.grad_norm, g);
  }
}

IterationRecord record_of(const ControlProblem& problem, const Sweep& sweep, int k, double eta) {
  IterationRecord r;
  r.k = k;
  r.cost = sweep.cost;
  r.grad_norm = sweep.grad_norm;
  r.endpoint_error =
      (sweep.states.row(sweep.states.rows() - 1).transpose() - problem.x_target).norm();
  r.eta = eta;
  return r;
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidParams, msg); };
  if (n_nodes < 2) fail("n_nodes must be at least 2");
  if (max_iterations < 0) fail("max_iterations must be nonnegative");
  if (!(damping_eta > 0.0 && damping_eta <= 1.0)) fail("damping_eta must lie in (0, 1]");
  if (!(cost_tolerance > 0.0) || !std::isfinite(cost_tolerance)) {
    fail("cost_tolerance must be positive");
  }
  if (!(stationarity_tolerance > 0.0) || !std::isfinite(stationarity_tolerance)) {
    fail("stationarity_tolerance must be positive");
  }
  if (initial_control.size() > 0 && initial_control.rows() != n_nodes) {
    fail("initial_control must have n_nodes rows");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kCostTolerance: return "cost_tol";
    case StopReason::kStationarityTolerance: return "stationarity_tol";
    case StopReason::kMaxIterations: return "max_iter";
    case StopReason::kDiverged: return "diverged";
  }
  return "unknown";
}

std::optional<StopReason> stop_reason_from_string(std::string_view text) {
  for (StopReason r : {StopReason::kCostTolerance, StopReason::kStationarityTolerance,
                       StopReason::kMaxIterations, StopReason::kDiverged}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

Matrix forward_sweep(const ControlProblem& problem, const Matrix& controls) {
  const int n = static_cast<int>(controls.rows());
  const int d = problem.dim();
  if (n < 2) throw Error(ErrorCode::kDegenerateGrid, "control grid needs at least 2 nodes");
  if (controls.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "control grid has the wrong number of columns");
  }
  const double h = (problem.tf - problem.t0) / (n - 1);
  Matrix x(n, d);
  Vector xi = problem.x0;
  x.row(0) = xi.transpose();
  for (int i = 0; i + 1 < n; ++i) {
    const Vector th0 = controls.row(i).transpose();
    const Vector th1 = controls.row(i + 1).transpose();
    const Vector thm = 0.5 * (th0 + th1);
    const Vector k1 = dynamics(problem, xi, th0);
    const Vector k2 = dynamics(problem, xi + 0.5 * h * k1, thm);
    const Vector k3 = dynamics(problem, xi + 0.5 * h * k2, thm);
    const Vector k4 = dynamics(problem, xi + h * k3, th1);
    xi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_bounded(xi, "state", i + 1);
    x.row(i + 1) = xi.transpose();
  }
  return x;
}

Matrix backward_sweep(const ControlProblem& problem, const Matrix& states, const Matrix& controls) {
  const int n = static_cast<int>(states.rows());
  const int d = problem.dim();
  if (n < 2) throw Error(ErrorCode::kDegenerateGrid, "state grid needs at least 2 nodes");
  if (controls.rows() != n || controls.cols() != d || states.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "state and control grids disagree");
  }
  const double h = (problem.tf - problem.t0) / (n - 1);
  auto rhs = [&problem](const Vector& x, const Vector& p, const Vector& theta) -> Vector {
    return -hamiltonian_gradients(problem, x, p, theta).dx;
  };

  Matrix p(n, d);
  Vector pi = -terminal_cost_gradient(problem, states.row(n - 1).transpose());
  p.row(n - 1) = pi.transpose();
  for (int i = n - 1; i > 0; --i) {
    const Vector x1 = states.row(i).transpose();
    const Vector x0 = states.row(i - 1).transpose();
    const Vector th1 = controls.row(i).transpose();
    const Vector th0 = controls.row(i - 1).transpose();
    const Vector xm = 0.5 * (x0 + x1);
    const Vector thm = 0.5 * (th0 + th1);
    const Vector k1 = rhs(x1, pi, th1);
    const Vector k2 = rhs(xm, pi - 0.5 * h * k1, thm);
    const Vector k3 = rhs(xm, pi - 0.5 * h * k2, thm);
    const Vector k4 = rhs(x0, pi - h * k3, th0);
    pi -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_bounded(pi, "costate", i - 1);
    p.row(i - 1) = pi.transpose();
  }
  return p;
}

Vector maximize_hamiltonian(const ControlProblem& problem, const Vector& x, const Vector& p,
                            double tolerance) {
  const Matrix s = problem.system.diffusion(x);
  if (problem.quadratic_in_control()) {
    const OmTerms t = om_terms(problem.system, x);
    return s.transpose() * p - t.drift_correction;
  }

  problem.system.check_diffusion(x);
  Vector theta = s.transpose() * p;
  double value = hamiltonian(problem, x, p, theta);
  double step = 1.0;
  for (int iter = 0; iter < kAscentSteps; ++iter) {
    const Vector g = hamiltonian_gradients(problem, x, p, theta).dtheta;
    const double gg = g.squaredNorm();
    if (std::sqrt(gg) < tolerance) return theta;
    step = std::min(1.0, 2.0 * step);
    while (true) {
      const Vector trial = theta + step * g;
      const double trial_value = hamiltonian(problem, x, p, trial);
      if (trial_value >= value + 1e-4 * step * gg) {
        theta = trial;
        value = trial_value;
        break;
      }
      step *= 0.5;
      if (step < 1e-12) {
        throw Error(ErrorCode::kAscentStall, "backtracking found no ascent step");
      }
    }
  }
  const double g = hamiltonian_gradients(problem, x, p, theta).dtheta.norm();
  if (g < tolerance) return theta;
  std::ostringstream os;
  os << "gradient ascent stopped after " << kAscentSteps << " steps with |dH/dtheta| = " << g;
  throw Error(ErrorCode::kAscentStall, os.str());
}

SolverReport msa_solve(const ControlProblem& problem, const SolverConfig& config) {
  config.validate();
  const int n = config.n_nodes;
  const int d = problem.dim();
  Matrix theta = config.initial_control.size() > 0 ? config.initial_control : Matrix::Zero(n, d);
  if (theta.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "initial_control has the wrong number of columns");
  }
  const double tol = config.stationarity_tolerance;

  SolverReport report;
  Sweep current;
  current.states = forward_sweep(problem, theta);
  current.cost = total_cost(problem, make_trajectory(problem, current.states, theta));
  complete_sweep(problem, theta, current, tol);
  report.iterations.push_back(record_of(problem, current, 0, 0.0));

  double eta = config.damping_eta;
  double rel_change = std::numeric_limits<double>::infinity();
  report.stop_reason = StopReason::kMaxIterations;

  bool was_stationary = false;
  for (int k = 1;; ++k) {
    const bool stationary = current.grad_norm <= tol;
    if (stationary && rel_change < config.cost_tolerance) {
      report.stop_reason =
          was_stationary ? StopReason::kCostTolerance : StopReason::kStationarityTolerance;
      report.converged = true;
      break;
    }
    was_stationary = stationary;
    if (k > config.max_iterations) break;

    bool accepted = false;
    bool blew_up = false;
    Sweep trial;
    Matrix trial_theta;
    while (true) {
      trial_theta = theta + eta * (current.best_controls - theta);
      try {
        trial.states = forward_sweep(problem, trial_theta);
        trial.cost = total_cost(problem, make_trajectory(problem, trial.states, trial_theta));
        blew_up = !std::isfinite(trial.cost);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumericalBlowup) throw;
        blew_up = true;
      }
      if (!blew_up && trial.cost - current.cost <= kCostSlack) {
        try {
          complete_sweep(problem, trial_theta, trial, tol);
          // Inside the slack only steps that also reduce stationarity count.
          accepted = trial.cost <= current.cost || trial.grad_norm < current.grad_norm;
          if (accepted) break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNumericalBlowup) throw;
          blew_up = true;
        }
      }
      ++report.rejected_steps;
      if (eta <= kMinDamping) break;
      eta = std::max(0.5 * eta, kMinDamping);
    }

    if (!accepted) {
      // Retrying the same rejected step until the budget runs out would
      // change nothing, so the run ends here with the budget's verdict.
      report.stalled = !blew_up;
      report.stop_reason = blew_up ? StopReason::kDiverged : StopReason::kMaxIterations;
      break;
    }
    rel_change = std::abs(trial.cost - current.cost) / std::max(1.0, std::abs(current.cost));
    theta = std::move(trial_theta);
    current = std::move(trial);
    report.iterations.push_back(record_of(problem, current, k, eta));
    eta = std::min(config.damping_eta, 2.0 * eta);
  }

  report.solution.times = uniform_grid(problem.t0, problem.tf, n);
  report.solution.states = std::move(current.states);
  report.solution.costates = std::move(current.costates);
  report.solution.controls = std::move(theta);
  return report;
}

double el_residual(const SystemModel& system, const Trajectory& traj) {
  traj.validate();
  const int n = traj.nodes();
  if (n < 5) throw Error(ErrorCode::kDegenerateGrid, "Euler-Lagrange residual needs 5 nodes");
  const double h = traj.spacing();
  if (h == 0.0) throw Error(ErrorCode::kDegenerateGrid, "zero-length horizon");
  const int d = traj.dim();
  const Matrix v = path_velocities(traj);

  // ∂L/∂ż = V(z)(ż − b(z)).
  Matrix momentum(n, d);
  for (int i = 1; i + 1 < n; ++i) {
    const Vector z = traj.states.row(i).transpose();
    const OmTerms t = om_terms(system, z);
    const Vector b = system.drift(z) - system.diffusion(z) * t.drift_correction;
    momentum.row(i) = (metric(system, z) * (v.row(i).transpose() - b)).transpose();
  }

  double worst = 0.0;
  for (int i = 2; i + 2 < n; ++i) {
    const Vector z = traj.states.row(i).transpose();
    const Vector vi = v.row(i).transpose();
    Vector dldz(d);
    Vector zp = z;
    Vector zm = z;
    for (int l = 0; l < d; ++l) {
      const double step = fd_step(z[l]);
      zp[l] = z[l] + step;
      zm[l] = z[l] - step;
      dldz[l] = (lagrangian_velocity(system, zp, vi) - lagrangian_velocity(system, zm, vi)) /
                (2.0 * step);
      zp[l] = z[l];
      zm[l] = z[l];
    }
    const Vector dpdt = (momentum.row(i + 1) - momentum.row(i - 1)).transpose() / (2.0 * h);
    worst = std::max(worst, (dpdt - dldz).norm());
  }
  return worst;
}

double hamiltonian_constancy(const ControlProblem& problem, const Trajectory& traj) {
  if (!traj.has_costates() || !traj.has_controls()) {
    throw Error(ErrorCode::kInvalidArgument, "Hamiltonian spread needs costates and controls");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < traj.nodes(); ++i) {
    const double value = hamiltonian(problem, traj.states.row(i).transpose(),
                                     traj.costates.row(i).transpose(),
                                     traj.controls.row(i).transpose());
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  return hi - lo;
}

}  // namespace ompath
