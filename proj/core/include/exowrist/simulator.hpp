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

// Fixed-step closed loop shared by headless trials and the live server:
// operator command -> input mapping -> safety -> resolved rate / leveling /
// wrist PID -> tendon plant -> kinematics.

#include <cstdint>
#include <vector>

#include "exowrist/trials.hpp"

namespace exowrist::trials {

class Simulator {
 public:
  Simulator(const SimParams& params, Condition condition, const RomDeg& rom, const task::TaskSpec& task,
            std::uint64_t grip_seed);

  struct Tick {
    Sample sample;              // state at the start of the tick plus the command applied
    std::vector<Event> events;  // raised at the sample time
    bool terminal = false;      // task finished (release/placement or a drop)
  };

  // Records the current state with cmd, then integrates one step.
  Tick step(const teleop::OperatorCommand& cmd);

  // Records the current state without moving (used for the final sample).
  Sample observe() const;

  // Freezes every joint until cleared; commands are ignored meanwhile.
  void set_estop(bool on);
  bool estopped() const { return estop_; }

  teleop::SimSnapshot snapshot() const;
  const arm::JointConfig& joints() const { return q_; }
  double time() const;
  std::int64_t tick_count() const { return tick_; }
  bool holding() const { return holding_; }
  double theta_ref() const { return leveling_.theta_ref; }
  Condition condition() const { return condition_; }

 private:
  Sample make_sample(const arm::ChainFrames& f, const arm::CupTilt& tilt) const;

  SimParams params_;
  Condition condition_;
  arm::WristRom rom_;
  task::TaskSpec task_;
  actuation::ClockSpring spring_;
  control::SafetyLimits limits_;
  control::LevelingConfig leveling_;
  control::PidState pid_;
  actuation::PlantState plant_;
  arm::JointConfig q_;
  double setpoint_ = 0.0;
  double grip_capacity_ = 0.0;
  std::int64_t tick_ = 0;
  bool holding_ = false;
  bool estop_ = false;
};

// Rounds to the 6-decimal log precision and clears negative zero.
double quantize(double x);

}  // namespace exowrist::trials
