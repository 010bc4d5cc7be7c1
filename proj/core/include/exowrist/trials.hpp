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

// Trial harness: closed-loop execution of one task under one condition,
// outcome classification, condition scheduling, and 100 Hz logs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exowrist/actuation.hpp"
#include "exowrist/arm_model.hpp"
#include "exowrist/control.hpp"
#include "exowrist/error.hpp"
#include "exowrist/policy.hpp"
#include "exowrist/task.hpp"

namespace exowrist::trials {

using task::Condition;
using task::TaskKind;

inline constexpr double kTimeout = 60.0;
inline constexpr int kSchemaVersion = 1;

// Per-user wrist stops in degrees (adduction negative).
struct RomDeg {
  double adduction_min = -40.0;
  double abduction_max = 30.0;

  arm::WristRom to_rad() const;
  bool operator==(const RomDeg&) const = default;
};

struct TrialConfig {
  std::string participant_id;
  Condition condition = Condition::wrist_enabled;
  std::uint64_t seed = 0;
  RomDeg rom;
  task::TaskSpec task;
  int trial_index = 0;  // position in the schedule
  int repetition = 0;   // 0-based within participant/condition/task
  double operator_speed = 1.0;  // scripted operator stick gain

  bool operator==(const TrialConfig&) const = default;
};

// One logged tick, in log units (degrees, meters, normalized commands).
struct Sample {
  double t = 0.0;
  std::array<double, 5> q_deg{};
  double grasp = 0.0;
  std::array<double, 3> hand{};
  std::array<double, 4> quat{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
  double tilt_total_deg = 0.0;
  double tilt_corr_deg = 0.0;
  double theta_ref_deg = 0.0;
  std::array<double, 5> cmd{};
  int flag_speed = 0;
  int flag_rom = 0;

  bool operator==(const Sample&) const = default;
};

struct Event {
  std::string name;  // grasp, release, spill_onset, placement
  double t = 0.0;
  bool operator==(const Event&) const = default;
};

enum class SpillOutcome { spill, no_spill, not_applicable };
enum class LevelingOutcome { exo_only_success, human_assisted, not_leveled, grasp_failure, not_applicable };

std::string_view to_string(SpillOutcome o);
std::string_view to_string(LevelingOutcome o);
SpillOutcome spill_outcome_from_string(std::string_view s);
LevelingOutcome leveling_outcome_from_string(std::string_view s);

struct Outcome {
  SpillOutcome spill = SpillOutcome::not_applicable;
  LevelingOutcome leveling = LevelingOutcome::not_applicable;
  double tct = 0.0;
  bool timed_out = false;

  bool operator==(const Outcome&) const = default;
};

struct TrialRecord {
  TrialConfig config;
  std::vector<Sample> samples;
  std::vector<Event> events;
  Outcome outcome;

  std::optional<double> event_time(std::string_view name) const;
  bool operator==(const TrialRecord&) const = default;
};

struct SpillModel {
  double threshold_full_deg = 15.0;   // at fill 0.8
  double threshold_empty_deg = 25.0;  // at fill 0.2
  double min_duration = 0.1;          // s

  double threshold_deg(double fill_level) const;
};

struct LevelingCriteria {
  double tilt_tolerance_deg = 5.0;
  double marker_radius = 0.03;  // m
};

// Grip capacity is drawn once per trial; the load grows as the held object
// tilts away from vertical. Load above capacity drops the object.
struct GripModel {
  double capacity_mean = 1.0;
  double capacity_sd = 0.12;
  double base_load = 0.6;
  double tilt_gain = 1.0;  // load multiplier per unit sin(tilt)

  double load(double tilt_total_rad) const;
};

// Default links with the shoulder center at (0.10, 0.05, 1.10) in the world.
arm::ChainGeometry default_chain_geometry();

struct SimParams {
  arm::ChainGeometry geometry = default_chain_geometry();
  arm::ProximalAngles start_posture{1.3962634015954636, 0.0, -1.3962634015954636, 0.0};
  actuation::WristPlantParams plant;
  actuation::TendonPath tendon;
  std::optional<double> spring_stiffness_nmm_per_deg;  // default 12.32
  std::optional<double> spring_pretension;             // default computed from the ROM
  actuation::DriveParams drive;
  control::PidGains pid;
  double k_lev = 6.0;
  double hand_speed_max = 0.04;
  double wrist_speed_max = 0.2;
  double dls_lambda = 0.01;
  teleop::PolicyParams policy;
  SpillModel spill;
  LevelingCriteria leveling;
  GripModel grip;
  double timeout = kTimeout;
  double dt = 0.01;

  static SimParams defaults();
  actuation::ClockSpring spring(const arm::WristRom& rom) const;
};

// Throws ConfigError when a waypoint is out of reach from the start posture.
void check_reachable(const SimParams& p, const task::TaskSpec& t);

TrialRecord run_trial(const TrialConfig& cfg, const SimParams& p = SimParams::defaults());

// Recomputes spill_onset and the outcome fields from samples and events.
// Throws InapplicableError when no command was ever issued.
void finalize_outcome(TrialRecord& rec, const SimParams& p);

// Throws InapplicableError for the wrong task kind.
SpillOutcome classify_spill(const TrialRecord& rec, const SpillModel& model = {});
LevelingOutcome classify_leveling(const TrialRecord& rec, const LevelingCriteria& crit = {});

struct Participant {
  std::string id;
  RomDeg rom;
  double speed_scale = 1.0;
  bool operator==(const Participant&) const = default;
};

std::vector<Participant> default_participants();

struct ScheduleOptions {
  int trials_per_condition = 4;
  std::vector<TaskKind> tasks{TaskKind::drinking, TaskKind::scratch_level};
  task::SceneGeometry scene;
};

// Each participant runs both conditions in a seeded order; within a
// condition block every task is repeated trials_per_condition times. Trial
// seeds derive from (seed, trial_index).
std::vector<TrialConfig> randomize_schedule(const std::vector<Participant>& participants, std::uint64_t seed,
                                            const ScheduleOptions& opt = {});

class LogError : public Error {
 public:
  using Error::Error;
};

extern const std::array<std::string_view, 24> kLogColumns;

// Writes <base>.csv and <base>.json.
void write_log(const TrialRecord& rec, const std::filesystem::path& base);
// Accepts the base path or either file. Throws LogError naming the row or
// field at fault.
TrialRecord read_log(const std::filesystem::path& path);

std::string samples_to_csv(const std::vector<Sample>& samples);
std::vector<Sample> samples_from_csv(std::string_view text, double max_gap = 0.015);

}  // namespace exowrist::trials
