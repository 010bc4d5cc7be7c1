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

// Wrist position loop, proximal resolved-rate control, the auto-leveling
// outer loop and the safety supervisor. Everything here is an explicit-state
// step function; the caller owns the state.

#include <Eigen/Core>

#include "exowrist/arm_model.hpp"

namespace exowrist::control {

struct PidGains {
  double kp = 100.0;
  double ki = 0.01;
  double kd = 10.0;
  double output_limit = 100.0;

  void validate() const;
};

struct PidState {
  double integral = 0.0;
  double prev_measurement = 0.0;
  bool primed = false;  // prev_measurement is valid

  bool operator==(const PidState&) const = default;
};

struct PidOutput {
  double command = 0.0;
  PidState state;
};

// Derivative acts on the measurement, so setpoint steps do not kick. The
// integral is clamped so its contribution alone never exceeds output_limit.
PidOutput pid_step(const PidGains& g, const PidState& st, double setpoint, double measurement,
                   double dt);

using JointRates = Eigen::Vector4d;

// Damped least squares: J^T (J J^T + lambda^2 I)^-1 v.
JointRates resolved_rate(const arm::ChainGeometry& geom, const arm::JointConfig& q,
                         const arm::Vec3& v_cmd, double lambda = 0.01);

struct SafetyLimits {
  double hand_speed_max = 0.04;  // m/s
  double wrist_speed_max = 0.2;  // rad/s
  arm::WristRom wrist_rom = arm::device_wrist_rom();

  void validate() const;
};

struct LevelingConfig {
  double k_lev = 6.0;      // 1/s
  double theta_ref = 0.0;  // rad
  bool enabled = true;

  void validate() const;
};

// Applies the user's reference change, then returns the wrist setpoint
// increment k_lev * (theta_ref - tilt) * dt, capped at wrist_speed_max * dt.
// A disabled leveler returns 0 and leaves theta_ref alone.
double leveling_step(LevelingConfig& cfg, double tilt_correctable, double user_theta_ref_delta,
                     double wrist_speed_max, double dt);

struct SafetyFlags {
  bool hand_speed = false;
  bool wrist_speed = false;
  bool rom = false;

  bool any_speed() const { return hand_speed || wrist_speed; }
};

struct SafeCommand {
  arm::Vec3 hand_v = arm::Vec3::Zero();
  double wrist_v = 0.0;
  SafetyFlags flags;
};

SafeCommand apply_safety(const SafetyLimits& lim, const arm::JointConfig& q,
                         const arm::Vec3& hand_v_cmd, double wrist_v_cmd);

// Largest s in [0, 1] such that moving the proximal joints by s * dq (with
// the wrist already at q_next_wrist) displaces the hand center by at most
// max_step from its current position. Linearized rate commands can overshoot
// the Cartesian cap slightly on curved paths; this closes that gap.
double limit_hand_step(const arm::ChainGeometry& geom, const arm::JointConfig& q,
                       const JointRates& dq, double q_next_wrist, double max_step);

}  // namespace exowrist::control
