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

#include "exowrist/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace exowrist::control {

void PidGains::validate() const {
  if (!(output_limit > 0.0)) throw std::invalid_argument("pid: output_limit must be > 0");
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
    throw std::invalid_argument("pid: gains must be finite");
  }
}

PidOutput pid_step(const PidGains& g, const PidState& st, double setpoint, double measurement,
                   double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be > 0");
  const double error = setpoint - measurement;

  PidOutput out;
  out.state = st;
  out.state.integral += error * dt;
  if (g.ki != 0.0) {
    const double bound = g.output_limit / std::abs(g.ki);
    out.state.integral = std::clamp(out.state.integral, -bound, bound);
  }

  double derivative = 0.0;
  if (st.primed) derivative = (measurement - st.prev_measurement) / dt;
  out.state.prev_measurement = measurement;
  out.state.primed = true;

  const double u = g.kp * error + g.ki * out.state.integral - g.kd * derivative;
  out.command = std::clamp(u, -g.output_limit, g.output_limit);
  return out;
}

JointRates resolved_rate(const arm::ChainGeometry& geom, const arm::JointConfig& q,
                         const arm::Vec3& v_cmd, double lambda) {
  const arm::Jacobian j = arm::positional_jacobian(geom, q);
  const Eigen::Matrix3d a = j * j.transpose() + lambda * lambda * Eigen::Matrix3d::Identity();
  return j.transpose() * a.ldlt().solve(v_cmd);
}

void SafetyLimits::validate() const {
  if (!(hand_speed_max > 0.0) || !(wrist_speed_max > 0.0)) {
    throw std::invalid_argument("safety: speed limits must be > 0");
  }
  if (!wrist_rom.valid()) throw std::invalid_argument("safety: wrist rom min must be < max");
}

void LevelingConfig::validate() const {
  if (!(k_lev > 0.0)) throw std::invalid_argument("leveling: k_lev must be > 0");
}

double leveling_step(LevelingConfig& cfg, double tilt_correctable, double user_theta_ref_delta,
                     double wrist_speed_max, double dt) {
  if (!cfg.enabled) return 0.0;
  cfg.theta_ref += user_theta_ref_delta;
  const double cap = wrist_speed_max * dt;
  return std::clamp(cfg.k_lev * (cfg.theta_ref - tilt_correctable) * dt, -cap, cap);
}

SafeCommand apply_safety(const SafetyLimits& lim, const arm::JointConfig& q,
                         const arm::Vec3& hand_v_cmd, double wrist_v_cmd) {
  SafeCommand out;
  out.hand_v = hand_v_cmd;
  const double speed = hand_v_cmd.norm();
  if (speed > lim.hand_speed_max) {
    out.hand_v *= lim.hand_speed_max / speed;
    out.flags.hand_speed = true;
  }

  out.wrist_v = wrist_v_cmd;
  if (std::abs(wrist_v_cmd) > lim.wrist_speed_max) {
    out.wrist_v = std::copysign(lim.wrist_speed_max, wrist_v_cmd);
    out.flags.wrist_speed = true;
  }
  const bool pushing_out = (q.wrist_dev >= lim.wrist_rom.abduction_max && out.wrist_v > 0.0) ||
                           (q.wrist_dev <= lim.wrist_rom.adduction_min && out.wrist_v < 0.0);
  if (pushing_out) {
    out.wrist_v = 0.0;
    out.flags.rom = true;
  }
  return out;
}

double limit_hand_step(const arm::ChainGeometry& geom, const arm::JointConfig& q,
                       const JointRates& dq, double q_next_wrist, double max_step) {
  const arm::Vec3 start = arm::forward_kinematics(geom, q).position;
  auto displacement = [&](double s) {
    arm::JointConfig n = q;
    n.shoulder_fe += s * dq[0];
    n.shoulder_ie += s * dq[1];
    n.elbow_fe += s * dq[2];
    n.forearm_ps += s * dq[3];
    n.wrist_dev = q_next_wrist;
    return (arm::forward_kinematics(geom, n).position - start).norm();
  };
  if (displacement(1.0) <= max_step) return 1.0;
  if (displacement(0.0) > max_step) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (displacement(mid) <= max_step ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace exowrist::control
