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

#include "exowrist/arm_model.hpp"
#include "exowrist/trials.hpp"

using namespace exowrist;

namespace {

arm::JointConfig random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  arm::JointConfig q;
  q.set_proximal({u(rng), u(rng), u(rng), u(rng)});
  q.wrist_dev = 0.3 * u(rng);
  return q;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const auto g = trials::default_chain_geometry();
  std::mt19937_64 rng(1);
  const auto q = random_pose(rng);
  for (auto _ : state) benchmark::DoNotOptimize(arm::forward_kinematics(g, q));
}
BENCHMARK(BM_ForwardKinematics);

void BM_Jacobian(benchmark::State& state) {
  const auto g = trials::default_chain_geometry();
  std::mt19937_64 rng(2);
  const auto q = random_pose(rng);
  for (auto _ : state) benchmark::DoNotOptimize(arm::positional_jacobian(g, q));
}
BENCHMARK(BM_Jacobian);

void BM_RequiredDeviation(benchmark::State& state) {
  const auto g = trials::default_chain_geometry();
  const auto rom = arm::device_wrist_rom();
  std::mt19937_64 rng(3);
  const auto q = random_pose(rng);
  for (auto _ : state) benchmark::DoNotOptimize(arm::required_wrist_deviation(g, q.proximal(), 0.0, rom));
}
BENCHMARK(BM_RequiredDeviation);

}  // namespace

BENCHMARK_MAIN();
