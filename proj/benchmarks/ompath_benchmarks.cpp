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
#include "ompath/geometry.hpp"
#include "ompath/monte_carlo.hpp"
#include "ompath/msa_solver.hpp"
#include "ompath/systems.hpp"

#include <benchmark/benchmark.h>

namespace ompath {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

ControlProblem double_well_benchmark() {
  return assemble_problem(make_double_well(1.0), vec({-1}), vec({1}), 0.0, 1.0, 20.0);
}

void BM_GenericGeometryMaierStein(benchmark::State& state) {
  const SystemModel s = make_maier_stein(1.0, 0.5);
  const Vector z = vec({0.7, -0.3});
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_geometry(s, z));
}
BENCHMARK(BM_GenericGeometryMaierStein);

void BM_AnalyticOmTermsNpz(benchmark::State& state) {
  const SystemModel s = make_npz(NpzParams{});
  const Vector x = vec({1.5, 1.0, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(om_terms(s, x));
}
BENCHMARK(BM_AnalyticOmTermsNpz);

void BM_ForwardBackwardSweep(benchmark::State& state) {
  const ControlProblem p = double_well_benchmark();
  const int n = static_cast<int>(state.range(0));
  const Matrix theta = Matrix::Constant(n, 1, 0.5);
  for (auto _ : state) {
    const Matrix x = forward_sweep(p, theta);
    benchmark::DoNotOptimize(backward_sweep(p, x, theta));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ForwardBackwardSweep)->Arg(201)->Arg(801)->Complexity(benchmark::oN);

void BM_MsaSolveDoubleWell(benchmark::State& state) {
  const ControlProblem p = double_well_benchmark();
  SolverConfig c;
  c.n_nodes = static_cast<int>(state.range(0));
  c.max_iterations = 5000;
  for (auto _ : state) benchmark::DoNotOptimize(msa_solve(p, c));
}
BENCHMARK(BM_MsaSolveDoubleWell)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_EulerMaruyamaPath(benchmark::State& state) {
  const SystemModel s = make_double_well(1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(euler_maruyama(s, vec({-1}), 0, 1, 1e-3, ++seed, {0, 5}));
}
BENCHMARK(BM_EulerMaruyamaPath)->Unit(benchmark::kMicrosecond);

void BM_SampleTransitions(benchmark::State& state) {
  const SystemModel s = make_double_well(1.0);
  SampleOptions opt;
  opt.store_nodes = 201;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_transitions(s, vec({-1}), vec({1}), 0, 1, 1e-3, 0.1, state.range(0), 1, opt));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleTransitions)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ompath

BENCHMARK_MAIN();
