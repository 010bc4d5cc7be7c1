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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "exowrist_app/config.hpp"
#include "exowrist_app/report.hpp"

namespace exowrist::app {

// File stem for a scheduled trial, e.g. t007_P02_drinking_wrist_locked_r3.
std::string log_stem(const trials::TrialConfig& cfg);

// Schedule for one master seed, restricted to the configured tasks and
// conditions.
std::vector<trials::TrialConfig> build_schedule(const ExperimentConfig& cfg, std::uint64_t seed);

struct SeedRun {
  std::uint64_t seed = 0;
  std::filesystem::path dir;  // <output_dir>/seed_<seed>
  int trials_run = 0;
  int trials_skipped = 0;  // already logged by an earlier run
  Report report;
};

// Runs every seed's schedule into <output_dir>/seed_<seed>/logs and writes
// the report next to it. The report is built from the logs as re-read from
// disk, so analyze on the logs directory reproduces it byte for byte.
std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

}  // namespace exowrist::app
