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

#include "exowrist/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exowrist/units.hpp"

namespace exowrist::actuation {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Denominator of the implicit velocity update.
double implicit_mass(const WristPlantParams& p, const ClockSpring& s, double dt) {
  return p.inertia + p.damping * dt + s.stiffness() * dt * dt;
}

// Torque from everything except the motor, explicit part only.
double passive_torque(const WristPlantParams& p, const ClockSpring& s, const PlantState& st,
                      const arm::Pose& wrist_frame) {
  return spring_torque(s, st.theta) - gravity_torque(p, wrist_frame, st.theta);
}

}  // namespace

void WristPlantParams::validate() const {
  require(inertia > 0.0 && std::isfinite(inertia), "plant: inertia must be > 0");
  require(damping >= 0.0 && std::isfinite(damping), "plant: damping must be >= 0");
  require(hand_cup_mass >= 0.0 && std::isfinite(hand_cup_mass), "plant: mass must be >= 0");
  require(com_distance >= 0.0 && std::isfinite(com_distance), "plant: com distance must be >= 0");
  require(std::isfinite(gravity), "plant: gravity must be finite");
}

void TendonPath::validate() const {
  require(friction_mu >= 0.0 && std::isfinite(friction_mu), "tendon: mu must be >= 0");
  require(wrap_angle >= 0.0 && std::isfinite(wrap_angle), "tendon: wrap angle must be >= 0");
}

double TendonPath::efficiency() const { return std::exp(-friction_mu * wrap_angle); }

void ClockSpring::validate() const {
  require(stiffness_nmm_per_deg > 0.0 && std::isfinite(stiffness_nmm_per_deg),
          "spring: stiffness must be > 0");
  require(pretension >= 0.0 && std::isfinite(pretension), "spring: pretension must be >= 0");
}

double ClockSpring::stiffness() const { return nmm_per_deg_to_nm_per_rad(stiffness_nmm_per_deg); }

double gravity_torque(const WristPlantParams& p, const arm::Pose& wrist_frame, double theta) {
  const arm::Quat hand = wrist_frame.orientation *
                         arm::Quat(Eigen::AngleAxisd(theta, arm::deviation_axis_in_hand()));
  const arm::Vec3 lever = hand * arm::Vec3(p.com_distance, 0.0, 0.0);
  const arm::Vec3 axis = wrist_frame.orientation * arm::deviation_axis_in_hand();
  const arm::Vec3 weight(0.0, 0.0, -p.hand_cup_mass * p.gravity);
  return -axis.dot(lever.cross(weight));
}

double required_torque(const WristPlantParams& p, double theta, double theta_dot,
                       double theta_ddot, const arm::Pose& wrist_frame) {
  return p.inertia * theta_ddot + p.damping * theta_dot + gravity_torque(p, wrist_frame, theta);
}

double capstan_transmit(double t_in, const TendonPath& path) {
  if (!(t_in >= 0.0)) throw std::invalid_argument("capstan_transmit: negative tension");
  path.validate();
  return t_in * path.efficiency();
}

double spring_torque(const ClockSpring& s, double theta) {
  return -s.stiffness() * theta - s.pretension;
}

double default_pretension(const WristPlantParams& p, const ClockSpring& s, const arm::WristRom& rom) {
  require(rom.valid(), "default_pretension: invalid rom");
  const double worst_gravity = p.hand_cup_mass * p.gravity * p.com_distance;
  return s.stiffness() * std::max(0.0, -rom.adduction_min) + worst_gravity;
}

ClockSpring default_spring(const WristPlantParams& p, const arm::WristRom& rom) {
  ClockSpring s;
  s.pretension = default_pretension(p, s, rom);
  return s;
}

double torque_envelope_nmm_per_deg(const WristPlantParams& p, const ClockSpring& s,
                                   const arm::WristRom& rom) {
  require(rom.valid(), "torque_envelope: invalid rom");
  // Canonical grasp pose: forearm horizontal, so gravity is at its largest.
  const arm::Pose level;
  auto hold = [&](double theta) { return gravity_torque(p, level, theta) - spring_torque(s, theta); };
  const double span_deg = rad2deg(rom.abduction_max - rom.adduction_min);
  return (hold(rom.abduction_max) - hold(rom.adduction_min)) * 1e3 / span_deg;
}

PlantState step_plant(const WristPlantParams& p, const ClockSpring& s, const TendonPath& path,
                      const PlantState& st, const StepInputs& in, const arm::Pose& wrist_frame,
                      const arm::WristRom& rom) {
  if (!(in.dt > 0.0 && in.dt <= 0.1)) throw std::invalid_argument("step_plant: dt must be in (0, 0.1]");
  if (!rom.valid()) throw std::invalid_argument("step_plant: invalid rom");
  require(in.moment_arm >= 0.0, "step_plant: negative moment arm");

  const double motor = capstan_transmit(in.motor_tension, path) * in.moment_arm;
  const double drive = motor + passive_torque(p, s, st, wrist_frame);
  const double v1 = (p.inertia * st.theta_dot + in.dt * drive) / implicit_mass(p, s, in.dt);

  PlantState next;
  next.theta = st.theta + in.dt * v1;
  next.theta_dot = v1;
  if (next.theta >= rom.abduction_max) {
    next.theta = rom.abduction_max;
    next.theta_dot = 0.0;
    next.at_stop = true;
  } else if (next.theta <= rom.adduction_min) {
    next.theta = rom.adduction_min;
    next.theta_dot = 0.0;
    next.at_stop = true;
  }
  return next;
}

void DriveParams::validate() const {
  require(torque_per_unit > 0.0, "drive: torque_per_unit must be > 0");
  require(moment_arm > 0.0, "drive: moment arm must be > 0");
  require(tension_max > 0.0, "drive: tension_max must be > 0");
  require(speed_max > 0.0, "drive: speed_max must be > 0");
}

double drive_tension(const DriveParams& d, const WristPlantParams& p, const ClockSpring& s,
                     const TendonPath& path, const PlantState& st, double controller_output,
                     const arm::Pose& wrist_frame, double dt) {
  const double passive = passive_torque(p, s, st, wrist_frame);
  double torque = d.torque_per_unit * controller_output;
  if (d.feedforward) torque -= passive;

  // Motor torque that lands exactly on +/- speed_max after the step.
  const double m = implicit_mass(p, s, dt);
  const double v_cap = d.speed_max * (1.0 - 1e-9);
  auto torque_for = [&](double v1) { return (v1 * m - p.inertia * st.theta_dot) / dt - passive; };
  torque = std::clamp(torque, torque_for(-v_cap), torque_for(v_cap));

  const double gain = d.moment_arm * path.efficiency();
  return std::clamp(torque / gain, 0.0, d.tension_max);
}

}  // namespace exowrist::actuation
