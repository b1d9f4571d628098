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

#include "ompath/monte_carlo.hpp"

#include "ompath/error.hpp"
#include "ompath/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace ompath {

namespace {

constexpr double kBlowup = 1e8;
constexpr std::int64_t kBlock = 256;

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

unsigned worker_count(unsigned requested, std::int64_t work) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  const auto blocks = static_cast<unsigned>(std::max<std::int64_t>(1, (work + kBlock - 1) / kBlock));
  return std::min(n, blocks);
}

// Calls body(begin, end) over [0, count) in fixed blocks; the first exception
// thrown by any worker is rethrown here.
template <class Body>
void parallel_blocks(std::int64_t count, unsigned threads, Body body) {
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::int64_t begin = next.fetch_add(kBlock);
      if (begin >= count) return;
      try {
        body(begin, std::min(count, begin + kBlock));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const unsigned n = worker_count(threads, count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

// Runs one path; visit(step, x) returning false stops early.
template <class Visit>
void simulate(const SystemModel& system, const Vector& x0, int steps, double dt,
              const CounterNormal& noise, Visit visit) {
  const int d = system.dim();
  const double sqdt = std::sqrt(dt);
  Vector x = x0;
  Vector xi(d);
  if (!visit(0, x)) return;
  for (int k = 0; k < steps; ++k) {
    for (int j = 0; j < d; ++j) {
      xi[j] = noise(static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(d) + j);
    }
    x += system.drift(x) * dt + system.diffusion(x) * (sqdt * xi);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kBlowup) {
      std::ostringstream os;
      os << "Euler-Maruyama state left [-1e8, 1e8] at step " << k + 1;
      throw Error(ErrorCode::kNumericalBlowup, os.str());
    }
    if (!visit(k + 1, x)) return;
  }
}

std::vector<double> fine_times(double t0, double tf, int steps) {
  return uniform_grid(t0, tf, steps + 1);
}

Vector interpolate(const Trajectory& traj, double t) {
  const int n = traj.nodes();
  const double h = traj.spacing();
  if (h <= 0.0 || t <= traj.times.front()) return traj.states.row(0).transpose();
  if (t >= traj.times.back()) return traj.states.row(n - 1).transpose();
  const double s = (t - traj.times.front()) / h;
  const int i = std::min(static_cast<int>(s), n - 2);
  const double w = s - i;
  return ((1.0 - w) * traj.states.row(i) + w * traj.states.row(i + 1)).transpose();
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

CounterNormal::CounterNormal(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix(seed ^ splitmix(stream + 0x632be59bd9b4e019ULL))) {}

double CounterNormal::uniform(std::uint64_t counter) const noexcept {
  const std::uint64_t bits = splitmix(key_ + counter * 0xd1b54a32d192ed03ULL);
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double CounterNormal::operator()(std::uint64_t counter) const noexcept {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int euler_steps(double t0, double tf, double dt) {
  if (!(dt > 0.0) || !(tf > t0)) {
    throw Error(ErrorCode::kInvalidArgument, "Euler-Maruyama needs dt > 0 and tf > t0");
  }
  const double ratio = (tf - t0) / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * steps) {
    std::ostringstream os;
    os << "dt = " << dt << " does not divide the horizon " << tf - t0;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  return static_cast<int>(steps);
}

Trajectory euler_maruyama(const SystemModel& system, const Vector& x0, double t0, double tf,
                          double dt, std::uint64_t seed, const EulerMaruyamaOptions& options) {
  const int steps = euler_steps(t0, tf, dt);
  if (x0.size() != system.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "x0 does not match the system dimension");
  }
  const int stride = options.stride;
  if (stride < 1 || steps % stride != 0) {
    throw Error(ErrorCode::kInvalidArgument, "stride must divide the number of steps");
  }
  const int kept = steps / stride + 1;
  Trajectory out;
  out.times.resize(static_cast<std::size_t>(kept));
  out.states.resize(kept, system.dim());
  const std::vector<double> t = fine_times(t0, tf, steps);
  const CounterNormal noise(seed, options.stream);
  simulate(system, x0, steps, dt, noise, [&](int k, const Vector& x) {
    if (k % stride == 0) {
      out.times[k / stride] = t[k];
      out.states.row(k / stride) = x.transpose();
    }
    return true;
  });
  return out;
}

std::string_view to_string(SampleStatus status) {
  return status == SampleStatus::kOk ? "ok" : "NoTransitions";
}

void TransitionEnsemble::verify() const {
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const Matrix& p = paths[i];
    if (p.rows() != static_cast<Eigen::Index>(times.size()) || p.cols() != x_target.size()) {
      throw Error(ErrorCode::kValidationError, "ensemble path has the wrong shape");
    }
    const double miss = (p.row(p.rows() - 1).transpose() - x_target).norm();
    if (miss > delta) {
      std::ostringstream os;
      os << "stored path " << i << " ends " << miss << " from the target (delta " << delta << ")";
      throw Error(ErrorCode::kValidationError, os.str());
    }
  }
  if (accepted() > attempts) {
    throw Error(ErrorCode::kValidationError, "more accepted paths than attempts");
  }
}

TransitionEnsemble sample_transitions(const SystemModel& system, const Vector& x0,
                                      const Vector& x_target, double t0, double tf, double dt,
                                      double delta, std::int64_t max_attempts, std::uint64_t seed,
                                      const SampleOptions& options) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  if (max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one attempt");
  if (x0.size() != system.dim() || x_target.size() != system.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "endpoints do not match the system dimension");
  }
  const int steps = euler_steps(t0, tf, dt);
  if (options.store_nodes < 2 || steps % (options.store_nodes - 1) != 0) {
    std::ostringstream os;
    os << "store_nodes - 1 = " << options.store_nodes - 1 << " must divide the " << steps
       << " Euler-Maruyama steps";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  const int stride = steps / (options.store_nodes - 1);

  struct Hit {
    std::int64_t index;
    Matrix path;
  };
  std::vector<Hit> hits;
  std::mutex hits_mutex;
  parallel_blocks(max_attempts, options.threads, [&](std::int64_t begin, std::int64_t end) {
    std::vector<Hit> local;
    Matrix buffer(options.store_nodes, system.dim());
    for (std::int64_t a = begin; a < end; ++a) {
      const CounterNormal noise(seed, static_cast<std::uint64_t>(a));
      Vector last;
      simulate(system, x0, steps, dt, noise, [&](int k, const Vector& x) {
        if (k % stride == 0) buffer.row(k / stride) = x.transpose();
        if (k == steps) last = x;
        return true;
      });
      if ((last - x_target).norm() <= delta) local.push_back({a, buffer});
    }
    std::lock_guard lock(hits_mutex);
    for (auto& h : local) hits.push_back(std::move(h));
  });
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.index < b.index; });

  TransitionEnsemble ens;
  ens.times = uniform_grid(t0, tf, options.store_nodes);
  ens.attempts = max_attempts;
  ens.delta = delta;
  ens.dt = dt;
  ens.seed = seed;
  ens.x_target = x_target;
  ens.paths.reserve(hits.size());
  ens.attempt_index.reserve(hits.size());
  for (auto& h : hits) {
    ens.attempt_index.push_back(h.index);
    ens.paths.push_back(std::move(h.path));
  }
  ens.status = ens.paths.empty() ? SampleStatus::kNoTransitions : SampleStatus::kOk;
  return ens;
}

std::string_view to_string(ReferenceMethod method) {
  return method == ReferenceMethod::kPerSliceMode ? "per_slice_mode" : "min_action";
}

std::optional<ReferenceMethod> reference_method_from_string(std::string_view text) {
  if (text == "per_slice_mode") return ReferenceMethod::kPerSliceMode;
  if (text == "min_action") return ReferenceMethod::kMinAction;
  return std::nullopt;
}

double histogram_mode(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyEnsemble, "no samples for a histogram");
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double range = values.back() - lo;
  if (range <= 0.0) return lo;
  const std::size_t m = values.size();
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(m));
  std::size_t bins = 10;
  if (width > 0.0) {
    bins = std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(range / width)));
  }
  bins = std::min(bins, std::max<std::size_t>(10, m));
  const double w = range / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / w);
    ++counts[std::min(b, bins - 1)];
  }
  const auto best = static_cast<std::size_t>(
      std::distance(counts.begin(), std::max_element(counts.begin(), counts.end())));
  return lo + (static_cast<double>(best) + 0.5) * w;
}

std::vector<double> ensemble_actions(const TransitionEnsemble& ensemble,
                                     const SystemModel& system) {
  std::vector<double> actions;
  actions.reserve(ensemble.paths.size());
  Trajectory traj;
  traj.times = ensemble.times;
  for (const Matrix& p : ensemble.paths) {
    traj.states = p;
    actions.push_back(om_action(system, traj));
  }
  return actions;
}

Trajectory reference_path(const TransitionEnsemble& ensemble, ReferenceMethod method,
                          const SystemModel& system) {
  if (ensemble.paths.empty()) {
    throw Error(ErrorCode::kEmptyEnsemble, "reference path of an empty ensemble");
  }
  Trajectory out;
  out.times = ensemble.times;
  if (method == ReferenceMethod::kMinAction) {
    const std::vector<double> actions = ensemble_actions(ensemble, system);
    const auto best = std::distance(actions.begin(), std::min_element(actions.begin(), actions.end()));
    out.states = ensemble.paths[static_cast<std::size_t>(best)];
    return out;
  }
  const auto n = static_cast<Eigen::Index>(ensemble.times.size());
  const Eigen::Index d = ensemble.paths.front().cols();
  out.states.resize(n, d);
  std::vector<double> slice(ensemble.paths.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (std::size_t m = 0; m < ensemble.paths.size(); ++m) slice[m] = ensemble.paths[m](i, j);
      out.states(i, j) = histogram_mode(slice);
    }
  }
  return out;
}

double TubeEstimate::standard_error() const noexcept {
  if (trials <= 0) return 0.0;
  const double p = probability();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

TubeEstimate tube_estimate(const SystemModel& system, const Trajectory& reference,
                           const Vector& x0, double t0, double tf, double dt, double delta,
                           std::int64_t n_trials, std::uint64_t seed, unsigned threads) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  if (n_trials < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  if (reference.dim() != system.dim() || x0.size() != system.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "reference path does not match the system");
  }
  reference.validate();
  const int steps = euler_steps(t0, tf, dt);
  const std::vector<double> t = fine_times(t0, tf, steps);
  Matrix centre(steps + 1, system.dim());
  for (int k = 0; k <= steps; ++k) centre.row(k) = interpolate(reference, t[k]).transpose();

  std::atomic<std::int64_t> hits{0};
  parallel_blocks(n_trials, threads, [&](std::int64_t begin, std::int64_t end) {
    std::int64_t local = 0;
    for (std::int64_t a = begin; a < end; ++a) {
      const CounterNormal noise(seed, static_cast<std::uint64_t>(a));
      bool inside = true;
      try {
        simulate(system, x0, steps, dt, noise, [&](int k, const Vector& x) {
          inside = (x - centre.row(k).transpose()).norm() <= delta;
          return inside;
        });
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumericalBlowup) throw;
        inside = false;
      }
      if (inside) ++local;
    }
    hits += local;
  });
  return TubeEstimate{hits.load(), n_trials};
}

double tube_probability(const SystemModel& system, const Trajectory& reference, const Vector& x0,
                        double t0, double tf, double dt, double delta, std::int64_t n_trials,
                        std::uint64_t seed, unsigned threads) {
  return tube_estimate(system, reference, x0, t0, tf, dt, delta, n_trials, seed, threads)
      .probability();
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "paths differ in dimension");
  double worst = 0.0;
  for (int i = 0; i < a.nodes(); ++i) {
    worst = std::max(worst, (a.states.row(i).transpose() - interpolate(b, a.times[i])).norm());
  }
  return worst;
}

}  // namespace ompath
