// Copyright 2026 The dptopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "dptopk/fastjoint.hpp"
#include "dptopk/histogram.hpp"
#include "dptopk/joint.hpp"
#include "dptopk/peel.hpp"
#include "dptopk/random.hpp"

namespace {

using namespace dptopk;

Histogram synthetic_histogram(int64_t d) {
  RandomSource rs(42);
  std::vector<int64_t> scores(d);
  for (auto& v : scores) v = static_cast<int64_t>(rs.uniform_below(1000000));
  return build_histogram(std::move(scores));
}

void BM_FastJointSelect(benchmark::State& state) {
  Histogram h = synthetic_histogram(state.range(0));
  int k = static_cast<int>(state.range(1));
  RandomSource rs(1);
  MechanismParams params{k, 1.0, 0.0009765625};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fastjoint_select(h, params, rs));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FastJointSelect)
    ->Args({10000, 100})
    ->Args({100000, 100})
    ->Args({1000000, 100})
    ->Args({100000, 10})
    ->Args({100000, 200})
    ->Unit(benchmark::kMillisecond);

void BM_JointSelect(benchmark::State& state) {
  Histogram h = synthetic_histogram(state.range(0));
  int k = static_cast<int>(state.range(1));
  RandomSource rs(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(joint_select(h, k, 1.0, rs));
  }
}
BENCHMARK(BM_JointSelect)
    ->Args({10000, 100})
    ->Args({50000, 100})
    ->Unit(benchmark::kMillisecond);

void BM_CdpPeelSelect(benchmark::State& state) {
  Histogram h = synthetic_histogram(state.range(0));
  int k = static_cast<int>(state.range(1));
  RandomSource rs(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdp_peel_select(h, k, 1.0, 1e-6, rs));
  }
}
BENCHMARK(BM_CdpPeelSelect)->Args({100000, 100})->Unit(benchmark::kMillisecond);

void BM_PnfPeelSelect(benchmark::State& state) {
  Histogram h = synthetic_histogram(state.range(0));
  int k = static_cast<int>(state.range(1));
  RandomSource rs(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pnf_peel_select(h, k, 1.0, rs));
  }
}
BENCHMARK(BM_PnfPeelSelect)->Args({100000, 10})->Unit(benchmark::kMillisecond);

void BM_GroupIndexBuild(benchmark::State& state) {
  Histogram h = synthetic_histogram(state.range(0));
  int k = static_cast<int>(state.range(1));
  int64_t tau = compute_tau(h.d(), k, 1.0, 0.0009765625);
  TopScores t = top_scores(h, k);
  for (auto _ : state) {
    ValueIndex vi = build_value_index(h, t, tau);
    benchmark::DoNotOptimize(build_group_index(h, t, vi, tau));
  }
}
BENCHMARK(BM_GroupIndexBuild)
    ->Args({100000, 100})
    ->Args({1000000, 100})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
