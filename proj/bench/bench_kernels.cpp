/*
 Copyright 2026 The ctql Authors

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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "ctql/experiment.hpp"

namespace {

using namespace ctql;

const Grids kGrids;

BenchmarkPlan plan_for(int sessions, int episodes) {
  BenchmarkPlan plan;
  plan.sessions = sessions;
  plan.episodes = episodes;
  AlgorithmConfig base;
  const double betas[] = {0.9897};
  plan.algorithms = default_algorithms(RewardKind::kDistance, base, betas);
  return plan;
}

void BM_SessionsSerial(benchmark::State& state) {
  const auto plan = plan_for(static_cast<int>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(run_sessions_serial(plan, kGrids));
  state.SetItemsProcessed(state.iterations() * plan.sessions * 3 * plan.episodes);
}

void BM_SessionsParallel(benchmark::State& state) {
  const auto plan = plan_for(static_cast<int>(state.range(0)), 200);
  const int threads = omp_get_max_threads();
  for (auto _ : state) benchmark::DoNotOptimize(run_sessions_parallel(plan, kGrids, threads));
  state.SetItemsProcessed(state.iterations() * plan.sessions * 3 * plan.episodes);
  state.counters["threads"] = threads;
}

struct Trained {
  BenchmarkPlan plan = plan_for(4, 300);
  std::vector<SessionResult> sessions;
  std::vector<const QTable*> tables;
  Trained() {
    plan.algorithms.resize(1);
    sessions = run_sessions_serial(plan, kGrids);
    for (const auto& s : sessions) tables.push_back(&s.table);
  }
};

const Trained& trained() {
  static const Trained t;
  return t;
}

void BM_RobustnessSerial(benchmark::State& state) {
  const auto& t = trained();
  RobustnessPlan rp;
  rp.num_setups = static_cast<std::size_t>(state.range(0));
  const auto setups = robustness_setups(rp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_robustness_serial(rp, setups, t.plan.algorithms[0], t.tables, t.plan, kGrids));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RobustnessParallel(benchmark::State& state) {
  const auto& t = trained();
  RobustnessPlan rp;
  rp.num_setups = static_cast<std::size_t>(state.range(0));
  const auto setups = robustness_setups(rp);
  const int threads = omp_get_max_threads();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_robustness_parallel(rp, setups, t.plan.algorithms[0], t.tables,
                                                     t.plan, kGrids, threads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = threads;
}

BENCHMARK(BM_SessionsSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SessionsParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RobustnessSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RobustnessParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
