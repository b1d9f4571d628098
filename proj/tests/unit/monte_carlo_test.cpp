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

#include "ompath/error.hpp"
#include "ompath/geometry.hpp"
#include "ompath/monte_carlo.hpp"
#include "ompath/systems.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ompath {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// dX = f(X)dt + s dB in one dimension, bypassing the diffusion checks so s = 0 is allowed.
SystemModel scalar_system(std::function<double(double)> f, double s) {
  SystemDefinition d;
  d.dim = 1;
  d.drift = [f](const Vector& x) { return vec({f(x[0])}); };
  d.diffusion = [s](const Vector&) { return Matrix::Constant(1, 1, s); };
  d.label = "scalar";
  return SystemModel(std::move(d));
}

double double_well_drift(double x) { return x - x * x * x; }

// Exact flow of ẋ = x − x³.
double double_well_flow(double x0, double t) {
  return std::copysign(1.0 / std::sqrt(1.0 + (1.0 / (x0 * x0) - 1.0) * std::exp(-2.0 * t)), x0);
}

TEST(CounterNormal, ReproducibleAndStandard) {
  CounterNormal a(7, 3), b(7, 3), c(7, 4);
  EXPECT_EQ(a(11), b(11));
  EXPECT_NE(a(11), c(11));
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = a(static_cast<std::uint64_t>(i));
    sum += z;
    sq += z * z;
    const double u = a.uniform(static_cast<std::uint64_t>(i));
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(EulerMaruyama, NoiselessMatchesExplicitEuler) {
  const SystemModel sys = scalar_system(double_well_drift, 0.0);
  const double dt = 0.01;
  const Trajectory t = euler_maruyama(sys, vec({0.3}), 0.0, 1.0, dt, 5);
  ASSERT_EQ(t.nodes(), 101);
  double x = 0.3;
  for (int i = 0; i < 100; ++i) {
    x = x + double_well_drift(x) * dt;
    EXPECT_EQ(t.states(i + 1, 0), x);
  }
}

TEST(EulerMaruyama, BrownianVariance) {
  const SystemModel sys = scalar_system([](double) { return 0.0; }, 1.0);
  const int n = 10000;
  double sum = 0, sq = 0;
  for (int s = 0; s < n; ++s) {
    const Trajectory t =
        euler_maruyama(sys, vec({0.0}), 0.0, 1.0, 0.01, static_cast<std::uint64_t>(s), {0, 100});
    const double w = t.states(t.nodes() - 1, 0);
    sum += w;
    sq += w * w;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(EulerMaruyama, SameSeedIsBitwiseIdentical) {
  const SystemModel sys = make_maier_stein(1.0, 0.1);
  const Trajectory a = euler_maruyama(sys, vec({-1, 0}), 0, 1, 1e-3, 42, {9, 1});
  const Trajectory b = euler_maruyama(sys, vec({-1, 0}), 0, 1, 1e-3, 42, {9, 1});
  const Trajectory c = euler_maruyama(sys, vec({-1, 0}), 0, 1, 1e-3, 42, {10, 1});
  EXPECT_EQ(a.states, b.states);
  EXPECT_NE(a.states, c.states);
}

TEST(EulerMaruyama, StrideKeepsEndpoints) {
  const SystemModel sys = make_double_well(1.0);
  const Trajectory full = euler_maruyama(sys, vec({-1}), 0, 1, 1e-3, 3);
  const Trajectory thin = euler_maruyama(sys, vec({-1}), 0, 1, 1e-3, 3, {0, 5});
  ASSERT_EQ(full.nodes(), 1001);
  ASSERT_EQ(thin.nodes(), 201);
  for (int i = 0; i < thin.nodes(); ++i) EXPECT_EQ(thin.states(i, 0), full.states(5 * i, 0));
  EXPECT_DOUBLE_EQ(thin.times.back(), 1.0);
}

TEST(EulerMaruyama, StepCountValidation) {
  EXPECT_EQ(euler_steps(0, 1, 1e-3), 1000);
  EXPECT_EQ(euler_steps(0, 5, 0.01), 500);
  try {
    euler_steps(0, 1, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(euler_steps(0, 1, -0.1), Error);
}

TEST(EulerMaruyama, NoiselessLimitIsFirstOrder) {
  const SystemModel sys = scalar_system(double_well_drift, 0.0);
  const double exact = double_well_flow(0.2, 1.0);
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    const Trajectory t = euler_maruyama(sys, vec({0.2}), 0, 1, dt, 1);
    err.push_back(std::abs(t.states(t.nodes() - 1, 0) - exact));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 1.0, 0.2);
}

TEST(SampleTransitions, HugeBallAcceptsEverything) {
  const SystemModel sys = make_double_well(1.0);
  SampleOptions opt;
  opt.store_nodes = 11;
  const TransitionEnsemble e = sample_transitions(sys, vec({-1}), vec({1}), 0, 1, 0.01, 1e3, 200, 1, opt);
  EXPECT_EQ(e.accepted(), 200);
  EXPECT_DOUBLE_EQ(e.acceptance_rate(), 1.0);
  EXPECT_EQ(e.status, SampleStatus::kOk);
  ASSERT_EQ(e.times.size(), 11u);
  for (std::int64_t i = 0; i < e.accepted(); ++i) EXPECT_EQ(e.attempt_index[i], i);
  EXPECT_NO_THROW(e.verify());
}

double acceptance(double sigma, std::uint64_t seed) {
  SampleOptions opt;
  opt.store_nodes = 11;
  return sample_transitions(make_double_well(sigma), vec({-1}), vec({1}), 0, 1, 0.01, 0.1, 20000,
                            seed, opt)
      .acceptance_rate();
}

TEST(SampleTransitions, DoubleWellRateDropsWithNoise) {
  std::vector<double> hi, lo;
  for (std::uint64_t s : {1u, 2u, 3u}) {
    hi.push_back(acceptance(1.0, s));
    lo.push_back(acceptance(0.1, s));
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double m_hi = mean(hi), m_lo = mean(lo);
  EXPECT_GT(m_hi, 0.0);
  // Binomial standard error of the pooled difference.
  const double n = 3 * 20000.0;
  const double se = std::sqrt(m_hi * (1 - m_hi) / n + m_lo * (1 - m_lo) / n);
  EXPECT_GT(m_hi - m_lo, 3 * se);
}

TEST(SampleTransitions, NoTransitionsIsAStatus) {
  SampleOptions opt;
  opt.store_nodes = 11;
  const TransitionEnsemble e =
      sample_transitions(make_double_well(0.1), vec({-1}), vec({1}), 0, 1, 0.01, 0.01, 500, 4, opt);
  EXPECT_EQ(e.status, SampleStatus::kNoTransitions);
  EXPECT_EQ(e.accepted(), 0);
  EXPECT_THROW(reference_path(e, ReferenceMethod::kMinAction, make_double_well(0.1)), Error);
}

TEST(SampleTransitions, ThreadCountDoesNotMatter) {
  const SystemModel sys = make_double_well(1.0);
  SampleOptions one, four;
  one.store_nodes = four.store_nodes = 21;
  one.threads = 1;
  four.threads = 4;
  const auto a = sample_transitions(sys, vec({-1}), vec({1}), 0, 1, 0.01, 0.3, 3000, 9, one);
  const auto b = sample_transitions(sys, vec({-1}), vec({1}), 0, 1, 0.01, 0.3, 3000, 9, four);
  ASSERT_EQ(a.accepted(), b.accepted());
  EXPECT_EQ(a.attempt_index, b.attempt_index);
  for (std::size_t i = 0; i < a.paths.size(); ++i) EXPECT_EQ(a.paths[i], b.paths[i]);
}

TEST(SampleTransitions, StorageMustDivideSteps) {
  SampleOptions opt;
  opt.store_nodes = 7;
  EXPECT_THROW(sample_transitions(make_double_well(1), vec({-1}), vec({1}), 0, 1, 0.01, 0.1, 10, 1, opt),
               Error);
}

TEST(SampleTransitions, VerifyCatchesStrayPath) {
  SampleOptions opt;
  opt.store_nodes = 11;
  TransitionEnsemble e =
      sample_transitions(make_double_well(1), vec({-1}), vec({1}), 0, 1, 0.01, 1e3, 5, 1, opt);
  e.delta = 1e-9;
  try {
    e.verify();
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kValidationError);
  }
}

TransitionEnsemble single_path_ensemble(const Trajectory& path) {
  TransitionEnsemble e;
  e.times = path.times;
  e.paths = {path.states};
  e.attempt_index = {0};
  e.attempts = 1;
  e.delta = 1.0;
  e.x_target = path.states.row(path.nodes() - 1).transpose();
  return e;
}

TEST(ReferencePath, SinglePathIsItsOwnReference) {
  const SystemModel sys = make_double_well(1.0);
  const Trajectory p = euler_maruyama(sys, vec({-1}), 0, 1, 0.01, 2, {0, 10});
  const TransitionEnsemble e = single_path_ensemble(p);
  for (ReferenceMethod m : {ReferenceMethod::kMinAction, ReferenceMethod::kPerSliceMode}) {
    const Trajectory r = reference_path(e, m, sys);
    EXPECT_EQ(r.times, p.times);
    EXPECT_LT((r.states - p.states).cwiseAbs().maxCoeff(), 1e-12) << to_string(m);
  }
}

TEST(ReferencePath, MinActionIsTheSmallestAction) {
  const SystemModel sys = make_double_well(1.0);
  SampleOptions opt;
  opt.store_nodes = 21;
  const auto e = sample_transitions(sys, vec({-1}), vec({1}), 0, 1, 0.01, 1e3, 50, 3, opt);
  const std::vector<double> actions = ensemble_actions(e, sys);
  ASSERT_EQ(actions.size(), 50u);
  const double mean = std::accumulate(actions.begin(), actions.end(), 0.0) / actions.size();
  const Trajectory r = reference_path(e, ReferenceMethod::kMinAction, sys);
  const double a = om_action(sys, r);
  EXPECT_LE(a, mean);
  EXPECT_DOUBLE_EQ(a, *std::min_element(actions.begin(), actions.end()));
}

TEST(ReferencePath, MethodNamesRoundTrip) {
  for (ReferenceMethod m : {ReferenceMethod::kMinAction, ReferenceMethod::kPerSliceMode}) {
    EXPECT_EQ(reference_method_from_string(to_string(m)), m);
  }
  EXPECT_FALSE(reference_method_from_string("median").has_value());
}

TEST(HistogramMode, FindsTheDenseCluster) {
  std::vector<double> v;
  for (int i = 0; i < 300; ++i) v.push_back(2.0 + 0.01 * std::sin(i));
  for (int i = 0; i < 100; ++i) v.push_back(-3.0 + 0.5 * std::cos(i));
  // At least 10 bins, so the returned center is within range/20 of the cluster.
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  EXPECT_NEAR(histogram_mode(v), 2.0, (*hi - *lo) / 20.0 + 0.01);
  EXPECT_DOUBLE_EQ(histogram_mode({4.5}), 4.5);
  EXPECT_THROW(histogram_mode({}), Error);
}

TEST(Tube, WideTubeHoldsEveryPath) {
  const SystemModel sys = make_double_well(1.0);
  Trajectory ref;
  ref.times = uniform_grid(0, 1, 11);
  ref.states = Matrix::Constant(11, 1, -1.0);
  const TubeEstimate t = tube_estimate(sys, ref, vec({-1}), 0, 1, 0.01, 1e3, 500, 1);
  EXPECT_EQ(t.hits, 500);
  EXPECT_DOUBLE_EQ(t.probability(), 1.0);
  EXPECT_DOUBLE_EQ(t.standard_error(), 0.0);
}

TEST(Tube, DisplacedReferenceHoldsNothing) {
  const SystemModel sys = make_double_well(1.0);
  Trajectory ref;
  ref.times = uniform_grid(0, 1, 11);
  ref.states = Matrix::Constant(11, 1, 5.0);
  EXPECT_DOUBLE_EQ(tube_probability(sys, ref, vec({-1}), 0, 1, 0.01, 0.5, 500, 1), 0.0);
}

TEST(Tube, ThreadCountDoesNotMatter) {
  const SystemModel sys = make_double_well(1.0);
  Trajectory ref;
  ref.times = uniform_grid(0, 1, 11);
  ref.states = Matrix::Constant(11, 1, -1.0);
  const TubeEstimate a = tube_estimate(sys, ref, vec({-1}), 0, 1, 0.01, 0.8, 2000, 5, 1);
  const TubeEstimate b = tube_estimate(sys, ref, vec({-1}), 0, 1, 0.01, 0.8, 2000, 5, 3);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_GT(a.hits, 0);
  EXPECT_LT(a.hits, 2000);
}

TEST(SupDistance, InterpolatesTheSecondPath) {
  Trajectory a, b;
  a.times = uniform_grid(0, 1, 3);
  a.states = Matrix::Zero(3, 2);
  b.times = uniform_grid(0, 1, 2);
  b.states.resize(2, 2);
  b.states << 0, 0, 2, 0;
  // b at t = 0.5 is (1, 0); at t = 1 it is (2, 0).
  EXPECT_DOUBLE_EQ(sup_distance(a, b), 2.0);
  EXPECT_DOUBLE_EQ(sup_distance(a, a), 0.0);
}

}  // namespace
}  // namespace ompath
