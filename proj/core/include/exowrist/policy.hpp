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

// Scripted stand-in for a human operator: seeks the task waypoints with a
// proportional, saturating stick command, pauses at each one, and issues
// grasp/release at the matching phases.

#include <cstddef>

#include "exowrist/arm_model.hpp"
#include "exowrist/rng.hpp"
#include "exowrist/task.hpp"
#include "exowrist/teleop.hpp"

namespace exowrist::teleop {

struct PolicyParams {
  double noise_sd = 0.05;       // normalized, translation axes
  double arrive_tol = 0.005;    // m
  double slow_radius = 0.02;    // m, full deflection beyond this distance
  double reaction_min = 0.3;    // s, before the first command
  double reaction_max = 1.0;
  double dwell_min = 0.5;       // s, pause after reaching a waypoint
  double dwell_max = 1.5;
  double speed_scale = 1.0;     // per-operator stick gain, <= 1
  double scratch_lean = 0.2617993877991494;  // rad, reference set for the nose
  double relevel_skip_prob = 0.15;  // operator forgets to re-level before placing
  double ref_tol = 0.0087;      // rad, paddle released inside this band
  double ref_slow = 0.035;      // rad

  void validate() const;
};

struct SimSnapshot {
  double t = 0.0;
  arm::Vec3 hand = arm::Vec3::Zero();
  double theta_ref = 0.0;
  bool grasped = false;
};

class ScriptedPolicy {
 public:
  ScriptedPolicy(const PolicyParams& params, task::TaskSpec task, task::Condition condition, Rng& rng);

  OperatorCommand step(const SimSnapshot& snap, Rng& rng);

  std::size_t waypoint_index() const { return index_; }
  bool finished() const { return index_ >= task_.waypoints.size(); }

 private:
  double reference_target() const;

  PolicyParams params_;
  task::TaskSpec task_;
  task::Condition condition_;
  std::size_t index_ = 0;
  double hold_until_ = 0.0;
  bool skip_relevel_ = false;
};

}  // namespace exowrist::teleop
