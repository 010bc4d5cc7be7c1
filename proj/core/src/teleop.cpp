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

#include "exowrist/teleop.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exowrist::teleop {

std::string_view to_string(GraspEvent e) {
  switch (e) {
    case GraspEvent::grasp: return "grasp";
    case GraspEvent::release: return "release";
    case GraspEvent::none: break;
  }
  return "none";
}

GraspEvent grasp_event_from_string(std::string_view s) {
  if (s == "none") return GraspEvent::none;
  if (s == "grasp") return GraspEvent::grasp;
  if (s == "release") return GraspEvent::release;
  throw std::invalid_argument("unknown grasp event '" + std::string(s) + "'");
}

void OperatorCommand::set_axes(const std::array<double, 5>& a) {
  v_xy = {a[0], a[1]};
  v_z = a[2];
  wrist_ps_vel = a[3];
  wrist_dev_vel = a[4];
}

bool OperatorCommand::is_zero() const {
  for (double a : axes()) {
    if (a != 0.0) return false;
  }
  return grasp_event == GraspEvent::none;
}

double apply_deadzone(double x, double deadzone) {
  const double m = std::abs(x);
  if (m <= deadzone) return 0.0;
  return std::copysign((m - deadzone) / (1.0 - deadzone), x);
}

MappedInput map_input(const OperatorCommand& raw, const control::SafetyLimits& lim, double deadzone) {
  if (!(deadzone >= 0.0 && deadzone < 1.0)) throw std::invalid_argument("map_input: deadzone must be in [0, 1)");
  for (double a : raw.axes()) {
    if (!std::isfinite(a) || a < -1.0 || a > 1.0) {
      throw std::invalid_argument("map_input: axis value " + std::to_string(a) + " outside [-1, 1]");
    }
  }
  MappedInput out;
  out.hand_v = arm::Vec3(apply_deadzone(raw.v_xy[0], deadzone), apply_deadzone(raw.v_xy[1], deadzone),
                         apply_deadzone(raw.v_z, deadzone)) *
               lim.hand_speed_max;
  out.ps_rate = apply_deadzone(raw.wrist_ps_vel, deadzone) * lim.wrist_speed_max;
  out.dev_rate = apply_deadzone(raw.wrist_dev_vel, deadzone) * lim.wrist_speed_max;
  out.grasp_event = raw.grasp_event;
  return out;
}

void StalenessGuard::on_command(const OperatorCommand& c, double now) {
  latest_ = c;
  received_at_ = now;
  if (c.grasp_event != GraspEvent::none) event_pending_ = true;
}

bool StalenessGuard::stale(double now) const {
  return received_at_ < 0.0 || now - received_at_ > timeout_;
}

OperatorCommand StalenessGuard::current(double now) {
  OperatorCommand out;
  out.timestamp = now;
  if (!stale(now)) {
    out = latest_;
    out.timestamp = now;
  }
  out.grasp_event = event_pending_ ? latest_.grasp_event : GraspEvent::none;
  event_pending_ = false;
  return out;
}

}  // namespace exowrist::teleop
