// Copyright 2026 The qsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "qsl/bound.hpp"
#include "qsl/grape.hpp"
#include "qsl/linalg.hpp"
#include "qsl/model.hpp"

namespace {

using namespace qsl;

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  }
  return 0.5 * (a + a.adjoint());
}

void BM_ExpmHermitian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const CMatrix h = random_hermitian(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(expm_hermitian(h, 0.7));
}
BENCHMARK(BM_ExpmHermitian)->Arg(4)->Arg(8)->Arg(15);

void BM_BoundValueAndGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const BoundObjective bound(build_swap_goal(n), make_chain_system(n, m));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  RVector x(bound.param_count());
  for (auto& v : x) v = g(rng);
  RVector grad;
  for (auto _ : state) benchmark::DoNotOptimize(bound.value_and_gradient(x, grad));
}
BENCHMARK(BM_BoundValueAndGradient)->Args({4, 1})->Args({8, 1})->Args({15, 1})->Args({15, 7});

void BM_GrapeCost(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int slots = static_cast<int>(state.range(1));
  const ControlSystem system = make_chain_system(n, 1);
  const CMatrix goal = build_swap_goal(n);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  PulseSchedule s = PulseSchedule::zeros(0.1 * slots, slots, 1);
  for (int j = 0; j < slots; ++j) s.amplitudes(0, j) = g(rng);
  Eigen::MatrixXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(grape_cost(system, goal, s, &grad));
  state.SetItemsProcessed(state.iterations() * slots);
}
BENCHMARK(BM_GrapeCost)->Args({4, 200})->Args({8, 500})->Args({15, 500});

void BM_MaximizeBound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  BoundConfig config;
  config.restarts = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_bound(build_swap_goal(n), make_chain_system(n, 1), config));
  }
}
BENCHMARK(BM_MaximizeBound)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
