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

#include <random>

#include "exowrist/stats.hpp"

using namespace exowrist;

namespace {

stats::PairedSample sample(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> d(0.0, 1.0);
  stats::PairedSample s;
  for (std::size_t i = 0; i < n; ++i) {
    s.x.push_back(d(rng));
    s.y.push_back(d(rng) + 0.1);
  }
  return s;
}

void BM_ShapiroWilk(benchmark::State& state) {
  const auto s = sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stats::shapiro_wilk(s.x));
}
BENCHMARK(BM_ShapiroWilk)->Arg(8)->Arg(32)->Arg(256);

// Exact path up to the enumeration limit, normal approximation above it.
void BM_Wilcoxon(benchmark::State& state) {
  const auto s = sample(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stats::wilcoxon_signed_rank(s));
}
BENCHMARK(BM_Wilcoxon)->Arg(8)->Arg(25)->Arg(100);

void BM_SelectAndRun(benchmark::State& state) {
  const auto s = sample(32);
  for (auto _ : state) benchmark::DoNotOptimize(stats::select_and_run(s));
}
BENCHMARK(BM_SelectAndRun);

}  // namespace

BENCHMARK_MAIN();
