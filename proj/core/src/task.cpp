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

#include "exowrist/task.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exowrist::task {
namespace {

template <typename E, std::size_t N>
E parse(std::string_view s, const std::string_view (&names)[N], const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::string_view kKinds[] = {"drinking", "scratch_level"};
constexpr std::string_view kConditions[] = {"wrist_enabled", "wrist_locked"};
constexpr std::string_view kPhases[] = {"approach", "grasp", "transport", "target_contact", "release"};

arm::Vec3 jitter(const arm::Vec3& p, double sd, Rng* rng) {
  if (rng == nullptr || sd <= 0.0) return p;
  arm::Vec3 out = p;
  for (int i = 0; i < 3; ++i) out[i] += rng->truncated_normal(0.0, sd, 2.0);
  return out;
}

TaskSpec build(TaskKind kind, const SceneGeometry& scene, Rng* rng) {
  TaskSpec t;
  t.kind = kind;
  t.fill_level = scene.fill_level;
  t.stick_length = scene.stick_length;
  t.stick_base_offset = scene.stick_base_offset;
  t.marker = scene.marker;
  const arm::Vec3& cup = scene.cup;
  const double sd = scene.jitter_sd;

  t.waypoints.push_back({Phase::approach, cup + arm::Vec3(0.0, 0.0, 0.05)});
  t.waypoints.push_back({Phase::grasp, cup});
  t.waypoints.push_back({Phase::transport, jitter(cup + arm::Vec3(-0.05, 0.0, 0.10), sd, rng)});
  if (kind == TaskKind::drinking) {
    t.waypoints.push_back({Phase::target_contact, jitter(scene.mouth + scene.straw_offset, sd, rng)});
    t.waypoints.push_back({Phase::release, cup + arm::Vec3(0.0, 0.0, 0.01)});
  } else {
    const double reach = scene.stick_length - scene.stick_base_offset;
    const arm::Vec3 to_tip(-std::sin(scene.scratch_lean) * reach, 0.0, std::cos(scene.scratch_lean) * reach);
    t.waypoints.push_back({Phase::target_contact, jitter(scene.nose - to_tip, sd, rng)});
    t.waypoints.push_back({Phase::release, jitter(placement_hand_position(scene), sd, rng)});
  }
  return t;
}

}  // namespace

std::string_view to_string(TaskKind k) { return kKinds[static_cast<int>(k)]; }
std::string_view to_string(Condition c) { return kConditions[static_cast<int>(c)]; }
std::string_view to_string(Phase p) { return kPhases[static_cast<int>(p)]; }
TaskKind task_kind_from_string(std::string_view s) { return parse<TaskKind>(s, kKinds, "task kind"); }
Condition condition_from_string(std::string_view s) { return parse<Condition>(s, kConditions, "condition"); }
Phase phase_from_string(std::string_view s) { return parse<Phase>(s, kPhases, "phase"); }

void TaskSpec::validate() const {
  if (waypoints.size() < 2) throw std::invalid_argument("task: at least 2 waypoints required");
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i].phase < waypoints[i - 1].phase) {
      throw std::invalid_argument("task: waypoint " + std::to_string(i) + " phase out of order");
    }
  }
  for (const auto& w : waypoints) {
    if (!w.position.allFinite()) throw std::invalid_argument("task: non-finite waypoint");
  }
  if (!(fill_level >= 0.0 && fill_level <= 1.0)) throw std::invalid_argument("task: fill level outside [0, 1]");
  if (!(stick_length > 0.0)) throw std::invalid_argument("task: stick length must be > 0");
  if (!(stick_base_offset >= 0.0 && stick_base_offset < stick_length)) {
    throw std::invalid_argument("task: stick base offset must be in [0, stick length)");
  }
}

TaskSpec build_task(TaskKind kind, const SceneGeometry& scene, Rng& rng) { return build(kind, scene, &rng); }

TaskSpec build_task(TaskKind kind, const SceneGeometry& scene) { return build(kind, scene, nullptr); }

arm::Vec3 placement_hand_position(const SceneGeometry& scene) {
  return scene.marker + arm::Vec3(0.0, 0.0, scene.stick_base_offset);
}

}  // namespace exowrist::task
