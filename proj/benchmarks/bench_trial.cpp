// Copyright 2026 The exowrist Authors
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

#include "exowrist/rng.hpp"
#include "exowrist/task.hpp"
#include "exowrist/trials.hpp"

using namespace exowrist;

namespace {

trials::TrialConfig config(task::TaskKind kind, trials::Condition cond) {
  trials::TrialConfig c;
  c.participant_id = "P01";
  c.condition = cond;
  c.seed = 1;
  Rng rng(derive_seed(1, 0));
  c.task = task::build_task(kind, {}, rng);
  return c;
}

// One full 100 Hz trial, closed loop, no I/O.
void BM_DrinkingTrial(benchmark::State& state) {
  const auto cfg = config(task::TaskKind::drinking, static_cast<trials::Condition>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trials::run_trial(cfg));
}
BENCHMARK(BM_DrinkingTrial)
    ->Arg(static_cast<int>(trials::Condition::wrist_enabled))
    ->Arg(static_cast<int>(trials::Condition::wrist_locked))
    ->Unit(benchmark::kMillisecond);

void BM_LogRoundTrip(benchmark::State& state) {
  const auto rec = trials::run_trial(config(task::TaskKind::scratch_level, trials::Condition::wrist_enabled));
  for (auto _ : state) benchmark::DoNotOptimize(trials::samples_from_csv(trials::samples_to_csv(rec.samples)));
}
BENCHMARK(BM_LogRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
