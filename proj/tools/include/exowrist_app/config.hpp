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

#pragma once

// Experiment configuration, YAML dialect. Example (every key optional except
// schema_version):
//
//   schema_version: 1
//   output_dir: out
//   seeds: [1]
//   trials_per_condition: 4
//   tasks: [drinking, scratch_level]
//   conditions: [wrist_enabled, wrist_locked]
//   threads: 0                      # 0 = one per hardware thread
//   participants:
//     - {id: P01, rom_deg: [-40, 30], speed: 1.0}
//   plant:  {inertia: 0.0015, damping: 0.01, hand_cup_mass: 0.5, com_distance: 0.05}
//   spring: {stiffness_nmm_per_deg: 12.32, pretension_nm: 0.55}
//   tendon: {friction: 0.067, wrap_deg: 90}
//   policy: {noise_sd: 0.05}
//
// Unknown keys are rejected. Omitted participants fall back to the
// built-in eight.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exowrist/trials.hpp"

namespace exowrist::app {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  std::filesystem::path output_dir = "out";
  std::vector<std::uint64_t> seeds{1};
  int trials_per_condition = 4;
  std::vector<trials::TaskKind> tasks{trials::TaskKind::drinking, trials::TaskKind::scratch_level};
  std::vector<trials::Condition> conditions{trials::Condition::wrist_enabled, trials::Condition::wrist_locked};
  int threads = 0;
  std::vector<trials::Participant> participants = trials::default_participants();
  trials::SimParams sim = trials::SimParams::defaults();
};

// Throws ConfigError listing every offending field.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace exowrist::app
