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

#include "ompath/cli/runner.hpp"

#include "ompath/cli/io.hpp"
#include "ompath/error.hpp"
#include "ompath/geometry.hpp"

#include <chrono>
#include <cmath>

namespace ompath::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

class Writer {
 public:
  Writer(const OutputBlock& output, RunOutcome& outcome, std::ostream& log)
      : dir_(output.directory), output_(output), outcome_(outcome), log_(log) {}

  void csv(const std::string& name, const std::string& text) {
    if (output_.csv) put(name, text);
  }
  void json_file(const std::string& name, const json& value) {
    if (output_.json) put(name, dump_json(value));
  }

 private:
  void put(const std::string& name, const std::string& text) {
    const fs::path path = dir_ / name;
    write_atomic(path, text);
    outcome_.artifacts.push_back(path);
    log_ << "wrote " << path.string() << "\n";
  }

  fs::path dir_;
  const OutputBlock& output_;
  RunOutcome& outcome_;
  std::ostream& log_;
};

ControlProblem problem_of(const RunConfig& c, const SystemModel& system) {
  return assemble_problem(system, c.problem.x0, c.problem.x_target, c.problem.t0, c.problem.tf,
                          c.problem.terminal_weight);
}

struct SolveOutcome {
  SolverReport report;
  json report_json;
  bool converged = false;
};

SolveOutcome solve(const RunConfig& c, const SystemModel& system, std::ostream& log) {
  const ControlProblem problem = problem_of(c, system);
  SolverConfig config = c.solver.config;
  if (c.solver.initial_control != "zeros") {
    const Trajectory seed = read_trajectory_csv(c.solver.initial_control);
    if (!seed.has_controls()) {
      throw Error(ErrorCode::kValidationError,
                  "solver.initial_control file " + c.solver.initial_control + " has no theta columns");
    }
    config.initial_control = seed.controls;
  }

  const auto start = Clock::now();
  SolveOutcome out;
  out.report = msa_solve(problem, config);
  const double wall = seconds_since(start);
  out.converged = out.report.converged;

  const Trajectory& sol = out.report.solution;
  const Vector x_end = sol.states.row(sol.nodes() - 1).transpose();
  const Vector p_end = sol.costates.row(sol.nodes() - 1).transpose();
  json diagnostics = {
      {"hamiltonian_spread", hamiltonian_constancy(problem, sol)},
      {"terminal_costate_residual", (p_end + terminal_cost_gradient(problem, x_end)).norm()},
      {"action", om_action(system, sol)}};
  if (sol.nodes() >= 5) diagnostics["el_residual"] = el_residual(system, sol);

  out.report_json = solver_report_json(out.report);
  out.report_json["n_nodes"] = config.n_nodes;
  out.report_json["diagnostics"] = std::move(diagnostics);
  out.report_json["wall_time_seconds"] = wall;

  const IterationRecord& last = out.report.iterations.back();
  log << "solve: " << to_string(out.report.stop_reason)
      << (out.report.stalled ? " (line search stalled)" : "") << " after " << last.k
      << " iterations, J = " << format_double(last.cost)
      << ", endpoint error = " << format_double(last.endpoint_error) << "\n";
  return out;
}

struct SampleOutcome {
  TransitionEnsemble ensemble;
  json summary;
  Trajectory min_action;
  Trajectory per_slice_mode;
  std::vector<double> actions;
};

SampleOutcome sample(const RunConfig& c, const SystemModel& system, Writer& writer,
                     std::ostream& log) {
  const McBlock& mc = c.mc;
  SampleOptions options;
  options.store_nodes = mc.store_nodes;
  options.threads = mc.threads;
  const auto start = Clock::now();
  SampleOutcome out;
  out.ensemble = sample_transitions(system, c.problem.x0, c.problem.x_target, c.problem.t0,
                                    c.problem.tf, mc.dt, mc.delta, mc.attempts, mc.seed, options);
  const TransitionEnsemble& ens = out.ensemble;
  ens.verify();
  log << "sample: " << ens.accepted() << " of " << ens.attempts << " attempts end within "
      << format_double(mc.delta) << " of the target\n";

  out.summary = {{"attempts", ens.attempts},
                 {"accepted", ens.accepted()},
                 {"acceptance_rate", ens.acceptance_rate()},
                 {"status", std::string(to_string(ens.status))},
                 {"dt", ens.dt},
                 {"delta", ens.delta},
                 {"store_nodes", mc.store_nodes},
                 {"seed", ens.seed},
                 {"reference_method", std::string(to_string(mc.reference))},
                 {"attempt_index", ens.attempt_index}};
  if (ens.status == SampleStatus::kOk) {
    out.actions = ensemble_actions(ens, system);
    double sum = 0.0;
    for (double a : out.actions) sum += a;
    out.summary["action_min"] = *std::min_element(out.actions.begin(), out.actions.end());
    out.summary["action_mean"] = sum / static_cast<double>(out.actions.size());
    out.min_action = reference_path(ens, ReferenceMethod::kMinAction, system);
    out.per_slice_mode = reference_path(ens, ReferenceMethod::kPerSliceMode, system);
    writer.csv("reference_min_action.csv", trajectory_csv(out.min_action));
    writer.csv("reference_per_slice_mode.csv", trajectory_csv(out.per_slice_mode));
    writer.csv("ensemble_paths.csv", ensemble_csv(ens));
  }
  out.summary["wall_time_seconds"] = seconds_since(start);
  return out;
}

json tube_json(const TubeEstimate& e) {
  return {{"hits", e.hits},
          {"trials", e.trials},
          {"probability", e.probability()},
          {"standard_error", e.standard_error()}};
}

Trajectory ensemble_mean(const TransitionEnsemble& ens) {
  Trajectory mean;
  mean.times = ens.times;
  mean.states = Matrix::Zero(ens.paths.front().rows(), ens.paths.front().cols());
  for (const Matrix& p : ens.paths) mean.states += p;
  mean.states /= static_cast<double>(ens.paths.size());
  return mean;
}

json geometry_table(const RunConfig& c, const SystemModel& system, std::string& csv) {
  const int d = system.dim();
  csv.clear();
  for (int i = 1; i <= d; ++i) csv += (i > 1 ? ",x" : "x") + std::to_string(i);
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j) csv += ",V" + std::to_string(i) + std::to_string(j);
  }
  for (int i = 1; i <= d; ++i) {
    for (int l = 1; l <= d; ++l) {
      for (int j = 1; j <= d; ++j) {
        csv += ",Gamma" + std::to_string(i) + "_" + std::to_string(l) + std::to_string(j);
      }
    }
  }
  for (int i = 1; i <= d; ++i) csv += ",b" + std::to_string(i);
  csv += ",div_b,R\n";

  json points = json::array();
  for (const Vector& x : c.geometry.points) {
    const GeometryPoint g = evaluate_geometry(system, x);
    points.push_back(geometry_json(system, x));
    std::string row;
    for (int i = 0; i < d; ++i) row += (i ? "," : "") + format_double(x[i]);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) row += "," + format_double(g.metric_V(i, j));
    }
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < d; ++l) {
        for (int j = 0; j < d; ++j) row += "," + format_double(g.christoffel(i, l, j));
      }
    }
    for (int i = 0; i < d; ++i) row += "," + format_double(g.modified_drift_b[i]);
    row += "," + format_double(g.divergence_b) + "," + format_double(g.scalar_curvature_R) + "\n";
    csv += row;
  }
  return points;
}

}  // namespace

nlohmann::json geometry_json(const SystemModel& system, const Vector& x) {
  const GeometryPoint g = evaluate_geometry(system, x);
  const int d = system.dim();
  json gamma = json::array();
  for (int i = 0; i < d; ++i) {
    json slab = json::array();
    for (int l = 0; l < d; ++l) {
      json row = json::array();
      for (int j = 0; j < d; ++j) row.push_back(g.christoffel(i, l, j));
      slab.push_back(std::move(row));
    }
    gamma.push_back(std::move(slab));
  }
  return {{"x", vector_json(x)},
          {"metric", matrix_json(g.metric_V)},
          {"metric_inverse", matrix_json(g.metric_inverse)},
          {"christoffel", std::move(gamma)},
          {"modified_drift", vector_json(g.modified_drift_b)},
          {"divergence", g.divergence_b},
          {"scalar_curvature", g.scalar_curvature_R}};
}

Trajectory straight_line(const Vector& x0, const Vector& x_target, double t0, double tf, int nodes) {
  Trajectory line;
  line.times = uniform_grid(t0, tf, nodes);
  line.states.resize(nodes, x0.size());
  for (int i = 0; i < nodes; ++i) {
    const double s = nodes > 1 ? static_cast<double>(i) / (nodes - 1) : 0.0;
    line.states.row(i) = ((1.0 - s) * x0 + s * x_target).transpose();
  }
  return line;
}

RunOutcome run(const RunConfig& c, std::ostream& log) {
  const auto start = Clock::now();
  RunOutcome outcome;
  Writer writer(c.output, outcome, log);
  const SystemModel system = build_system(c.system);
  const std::string echo = to_config_text(c);
  log << to_string(c.command) << ": system " << system.label() << ", output "
      << c.output.directory << "\n";

  json base = {{"command", std::string(to_string(c.command))},
               {"system", system.label()},
               {"config_echo", echo},
               {"seed", c.mc.seed}};

  switch (c.command) {
    case Command::kSolve: {
      SolveOutcome s = solve(c, system, log);
      writer.csv("trajectory.csv", trajectory_csv(s.report.solution));
      json report = base;
      report.update(s.report_json);
      report["wall_time_seconds"] = seconds_since(start);
      writer.json_file("report.json", report);
      outcome.exit_code = s.converged ? kExitOk : kExitNotConverged;
      break;
    }
    case Command::kSample: {
      SampleOutcome s = sample(c, system, writer, log);
      json summary = base;
      summary.update(s.summary);
      summary["wall_time_seconds"] = seconds_since(start);
      writer.json_file("ensemble_summary.json", summary);
      outcome.exit_code = s.ensemble.status == SampleStatus::kOk ? kExitOk : kExitNotConverged;
      break;
    }
    case Command::kVerify: {
      SolveOutcome solved = solve(c, system, log);
      writer.csv("trajectory.csv", trajectory_csv(solved.report.solution));
      json report = base;
      report.update(solved.report_json);
      writer.json_file("report.json", report);

      SampleOutcome sampled = sample(c, system, writer, log);
      json summary = base;
      summary.update(sampled.summary);
      writer.json_file("ensemble_summary.json", summary);

      json verification = base;
      verification["solve"] = solved.report_json;
      verification["ensemble"] = sampled.summary;
      const Trajectory& msa = solved.report.solution;
      if (sampled.ensemble.status == SampleStatus::kOk) {
        const Trajectory& chosen = c.mc.reference == ReferenceMethod::kMinAction
                                       ? sampled.min_action
                                       : sampled.per_slice_mode;
        const double action_msa = om_action(system, msa);
        const double action_ref = om_action(system, chosen);
        const Trajectory line = straight_line(c.problem.x0, c.problem.x_target, c.problem.t0,
                                              c.problem.tf, msa.nodes());
        const std::uint64_t tube_seed = c.mc.seed + 1;
        const TubeEstimate tube_msa =
            tube_estimate(system, msa, c.problem.x0, c.problem.t0, c.problem.tf, c.mc.dt,
                          c.mc.tube_delta, c.mc.trials, tube_seed, c.mc.threads);
        const TubeEstimate tube_line =
            tube_estimate(system, line, c.problem.x0, c.problem.t0, c.problem.tf, c.mc.dt,
                          c.mc.tube_delta, c.mc.trials, tube_seed, c.mc.threads);
        const double se = std::hypot(tube_msa.standard_error(), tube_line.standard_error());
        const double gap = tube_msa.probability() - tube_line.probability();
        const double sup = sup_distance(msa, chosen);
        verification["comparison"] = {
            {"reference_method", std::string(to_string(c.mc.reference))},
            {"sup_distance", sup},
            {"sup_distance_min_action", sup_distance(msa, sampled.min_action)},
            {"sup_distance_per_slice_mode", sup_distance(msa, sampled.per_slice_mode)},
            {"sup_distance_ensemble_mean", sup_distance(msa, ensemble_mean(sampled.ensemble))},
            {"action_msa", action_msa},
            {"action_reference", action_ref},
            {"action_gap", action_ref - action_msa},
            {"tube",
             {{"delta", c.mc.tube_delta},
              {"seed", tube_seed},
              {"msa", tube_json(tube_msa)},
              {"straight_line", tube_json(tube_line)},
              {"separation_sigma", se > 0.0 ? gap / se : 0.0}}}};
        log << "verify: sup distance " << format_double(sup) << ", tube probability "
            << format_double(tube_msa.probability()) << " (path) vs "
            << format_double(tube_line.probability()) << " (line)\n";
      }
      verification["wall_time_seconds"] = seconds_since(start);
      writer.json_file("verification.json", verification);
      const bool ok = solved.converged && sampled.ensemble.status == SampleStatus::kOk;
      outcome.exit_code = ok ? kExitOk : kExitNotConverged;
      break;
    }
    case Command::kGeometry: {
      std::string csv;
      json table = base;
      table["points"] = geometry_table(c, system, csv);
      writer.csv("geometry.csv", csv);
      writer.json_file("geometry.json", table);
      break;
    }
  }
  return outcome;
}

}  // namespace ompath::cli
