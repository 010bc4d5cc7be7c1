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

// The two functional tasks as hand waypoint sequences.
//
// Default scene, world frame (x forward, y left, z up; meters). The user's
// shoulder center sits at (0.10, 0.05, 1.10), so everything below is in
// front of and below the shoulder, on a table at z = 0.75.
//
//   cup / stick pickup  (0.45,  0.10, 0.75)
//   mouth               (0.15,  0.05, 1.30)
//   nose                (0.21,  0.05, 1.34)
//   placement marker    (0.40, -0.05, 0.75)
//
// Drinking goes through a straw, so the hand stops short of the mouth at
// mouth + straw_offset. For the scratch task the stick is gripped just above
// its base and points along the cup-up axis; its tip touches the nose when
// the stick leans scratch_lean toward the face, and its base stands on the
// marker at placement.

#include <string>
#include <string_view>
#include <vector>

#include "exowrist/arm_model.hpp"
#include "exowrist/rng.hpp"

namespace exowrist::task {

enum class TaskKind { drinking, scratch_level };
enum class Condition { wrist_enabled, wrist_locked };
enum class Phase { approach, grasp, transport, target_contact, release };

std::string_view to_string(TaskKind k);
std::string_view to_string(Condition c);
std::string_view to_string(Phase p);
TaskKind task_kind_from_string(std::string_view s);   // throws std::invalid_argument
Condition condition_from_string(std::string_view s);  // throws std::invalid_argument
Phase phase_from_string(std::string_view s);          // throws std::invalid_argument

struct Waypoint {
  Phase phase = Phase::approach;
  arm::Vec3 position = arm::Vec3::Zero();
  bool operator==(const Waypoint&) const = default;
};

struct TaskSpec {
  TaskKind kind = TaskKind::drinking;
  std::vector<Waypoint> waypoints;
  double fill_level = 0.75;    // cup, [0, 1]
  double stick_length = 0.48;  // m
  double stick_base_offset = 0.08;  // m, hand center to stick base along -z
  arm::Vec3 marker = arm::Vec3::Zero();

  // Throws std::invalid_argument: fewer than 2 waypoints, phases out of
  // canonical order, or object parameters out of range.
  void validate() const;
  bool operator==(const TaskSpec&) const = default;
};

struct SceneGeometry {
  arm::Vec3 cup{0.45, 0.10, 0.75};
  arm::Vec3 mouth{0.15, 0.05, 1.30};
  arm::Vec3 nose{0.21, 0.05, 1.34};
  arm::Vec3 marker{0.40, -0.05, 0.75};
  arm::Vec3 straw_offset{0.14, 0.0, -0.38};
  double fill_level = 0.75;
  double stick_length = 0.48;
  double stick_base_offset = 0.08;
  double scratch_lean = 0.2617993877991494;  // 15 deg
  double jitter_sd = 0.015;                  // m, per axis, clipped at 2 sd
};

// Builds the waypoint list; transport and target_contact points get a
// seeded per-trial jitter.
TaskSpec build_task(TaskKind kind, const SceneGeometry& scene, Rng& rng);
TaskSpec build_task(TaskKind kind, const SceneGeometry& scene);  // no jitter

// Hand position with the stick base on the marker and the stick upright.
arm::Vec3 placement_hand_position(const SceneGeometry& scene);

}  // namespace exowrist::task
