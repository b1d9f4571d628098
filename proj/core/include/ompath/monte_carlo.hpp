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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace ompath {

/// Stateless normal variates keyed by (seed, stream, counter). Any draw can
/// be reproduced without replaying the ones before it, so paths split
/// across threads in any order give identical results.
class CounterNormal {
 public:
  CounterNormal(std::uint64_t seed, std::uint64_t stream) noexcept;

  double operator()(std::uint64_t counter) const noexcept;
  double uniform(std::uint64_t counter) const noexcept;  // in (0, 1]

 private:
  std::uint64_t key_;
};

struct EulerMaruyamaOptions {
  std::uint64_t stream = 0;
  /// Keep every `stride`-th state (the last state is always kept).
  int stride = 1;
};

/// Xₙ₊₁ = Xₙ + b̃(Xₙ)dt + σ(Xₙ)√dt ξₙ. `dt` must divide tf − t0 to 1e-9
/// relative (InvalidArgument). Throws NumericalBlowup once |X| > 1e8.
Trajectory euler_maruyama(const SystemModel& system, const Vector& x0, double t0, double tf,
                          double dt, std::uint64_t seed, const EulerMaruyamaOptions& options = {});

/// Number of Euler-Maruyama steps covering [t0, tf]; InvalidArgument if dt
/// does not divide the horizon.
int euler_steps(double t0, double tf, double dt);

enum class SampleStatus { kOk, kNoTransitions };

std::string_view to_string(SampleStatus status);

struct TransitionEnsemble {
  std::vector<double> times;  // storage grid
  std::vector<Matrix> paths;  // each n x d, ordered by attempt index
  std::vector<std::int64_t> attempt_index;
  std::int64_t attempts = 0;
  double delta = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  Vector x_target;
  SampleStatus status = SampleStatus::kOk;

  std::int64_t accepted() const noexcept { return static_cast<std::int64_t>(paths.size()); }
  double acceptance_rate() const noexcept {
    return attempts > 0 ? static_cast<double>(accepted()) / static_cast<double>(attempts) : 0.0;
  }
  /// Throws ValidationError if a stored path misses the endpoint ball.
  void verify() const;
};

struct SampleOptions {
  /// Nodes kept per accepted path; store_nodes − 1 must divide the step count.
  int store_nodes = 201;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Runs `max_attempts` independent paths (stream = attempt index) and keeps
/// those ending within `delta` of x_target. Zero acceptances give status
/// kNoTransitions rather than an exception.
TransitionEnsemble sample_transitions(const SystemModel& system, const Vector& x0,
                                      const Vector& x_target, double t0, double tf, double dt,
                                      double delta, std::int64_t max_attempts, std::uint64_t seed,
                                      const SampleOptions& options = {});

enum class ReferenceMethod { kPerSliceMode, kMinAction };

std::string_view to_string(ReferenceMethod method);
std::optional<ReferenceMethod> reference_method_from_string(std::string_view text);

/// Empirical most probable path of an ensemble. Per-slice mode takes, at
/// every node and per coordinate, the center of the fullest histogram bin
/// (Freedman-Diaconis width, at least 10 bins). Min-action returns the member
/// with the smallest Onsager-Machlup action. Throws EmptyEnsemble.
Trajectory reference_path(const TransitionEnsemble& ensemble, ReferenceMethod method,
                          const SystemModel& system);

/// om_action of every ensemble member.
std::vector<double> ensemble_actions(const TransitionEnsemble& ensemble, const SystemModel& system);

/// Center of the fullest Freedman-Diaconis bin of `values`.
double histogram_mode(std::vector<double> values);

struct TubeEstimate {
  std::int64_t hits = 0;
  std::int64_t trials = 0;

  double probability() const noexcept {
    return trials > 0 ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  }
  double standard_error() const noexcept;
};

/// Fraction of fresh paths that stay within `delta` (Euclidean norm) of the
/// reference at every Euler-Maruyama step, t0 included. The reference is
/// interpolated linearly between its nodes.
TubeEstimate tube_estimate(const SystemModel& system, const Trajectory& reference,
                           const Vector& x0, double t0, double tf, double dt, double delta,
                           std::int64_t n_trials, std::uint64_t seed, unsigned threads = 0);

double tube_probability(const SystemModel& system, const Trajectory& reference, const Vector& x0,
                        double t0, double tf, double dt, double delta, std::int64_t n_trials,
                        std::uint64_t seed, unsigned threads = 0);

/// max over the nodes of `a` of |a(t) − b(t)|, with b interpolated linearly.
double sup_distance(const Trajectory& a, const Trajectory& b);

}  // namespace ompath
