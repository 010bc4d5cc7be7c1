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

// Operator command model and the gamepad-style input mapping.

#include <array>
#include <string_view>

#include "exowrist/arm_model.hpp"
#include "exowrist/control.hpp"

namespace exowrist::teleop {

enum class GraspEvent { none, grasp, release };

std::string_view to_string(GraspEvent e);
GraspEvent grasp_event_from_string(std::string_view s);  // throws std::invalid_argument

// Normalized stick, lever and paddle deflections in [-1, 1].
struct OperatorCommand {
  std::array<double, 2> v_xy{0.0, 0.0};
  double v_z = 0.0;
  double wrist_ps_vel = 0.0;
  double wrist_dev_vel = 0.0;
  GraspEvent grasp_event = GraspEvent::none;
  double timestamp = 0.0;

  // Order used on the wire and in logs: vx, vy, vz, ps, dev.
  std::array<double, 5> axes() const { return {v_xy[0], v_xy[1], v_z, wrist_ps_vel, wrist_dev_vel}; }
  void set_axes(const std::array<double, 5>& a);
  bool is_zero() const;

  bool operator==(const OperatorCommand&) const = default;
};

inline constexpr double kDefaultDeadzone = 0.05;

struct MappedInput {
  arm::Vec3 hand_v = arm::Vec3::Zero();  // m/s
  double ps_rate = 0.0;                  // rad/s
  double dev_rate = 0.0;                 // rad/s
  GraspEvent grasp_event = GraspEvent::none;
};

// Deadzone with linear rescale so the response is continuous at its edge.
double apply_deadzone(double x, double deadzone = kDefaultDeadzone);

// Full deflection maps to the speed caps. Throws std::invalid_argument for
// axes outside [-1, 1] or non-finite values.
MappedInput map_input(const OperatorCommand& raw, const control::SafetyLimits& lim,
                      double deadzone = kDefaultDeadzone);

// Live-mode fail-safe: returns a zero command once the latest one is older
// than the timeout.
class StalenessGuard {
 public:
  explicit StalenessGuard(double timeout_s = 0.2) : timeout_(timeout_s) {}

  void on_command(const OperatorCommand& c, double now);
  // Grasp events are delivered once.
  OperatorCommand current(double now);
  bool stale(double now) const;

 private:
  double timeout_;
  OperatorCommand latest_;
  double received_at_ = -1.0;
  bool event_pending_ = false;
};

}  // namespace exowrist::teleop
