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

// Wrist ab-ad plant: rigid-body dynamics, Bowden-cable capstan loss,
// clock-spring return and the motor drive that turns a controller output
// into tendon tension.
//
// Sign convention: positive torque drives abduction (positive theta). The
// tendon can only pull toward abduction; the clock spring pulls back toward
// adduction.

#include "exowrist/arm_model.hpp"

namespace exowrist::actuation {

struct WristPlantParams {
  double inertia = 0.0015;     // kg m^2
  double damping = 0.01;       // N m s / rad
  double hand_cup_mass = 0.5;  // kg, assumed
  double com_distance = 0.05;  // m, wrist center to hand+cup COM, assumed
  double gravity = 9.81;

  void validate() const;
};

struct TendonPath {
  double friction_mu = 0.067;
  double wrap_angle = 1.5707963267948966;  // one quarter turn through the housing

  void validate() const;
  double efficiency() const;  // T_out / T_in
};

struct ClockSpring {
  double stiffness_nmm_per_deg = 12.32;
  double pretension = 0.0;  // N m at theta = 0

  void validate() const;
  double stiffness() const;  // N m / rad
};

struct PlantState {
  double theta = 0.0;
  double theta_dot = 0.0;
  bool at_stop = false;

  bool operator==(const PlantState&) const = default;
};

// Moment of the hand+cup weight about the deviation axis, positive when it
// loads the joint toward adduction. wrist_frame is the pre-deviation wrist
// pose from arm::chain_frames.
double gravity_torque(const WristPlantParams& p, const arm::Pose& wrist_frame, double theta);

// I*theta_ddot + b*theta_dot + tau_grav.
double required_torque(const WristPlantParams& p, double theta, double theta_dot,
                       double theta_ddot, const arm::Pose& wrist_frame);

// T_in * exp(-mu * wrap). Throws std::invalid_argument for t_in < 0.
double capstan_transmit(double t_in, const TendonPath& path);

// -k*theta - tau0.
double spring_torque(const ClockSpring& s, double theta);

// Smallest pretension that keeps the spring pulling toward adduction over
// the whole ROM with the worst-case gravity load on top, so the tendon never
// goes slack and the hand always returns passively.
double default_pretension(const WristPlantParams& p, const ClockSpring& s, const arm::WristRom& rom);

// Spring at its default pretension.
ClockSpring default_spring(const WristPlantParams& p, const arm::WristRom& rom);

// Static motor torque span over the ROM divided by its width, in N mm/deg.
double torque_envelope_nmm_per_deg(const WristPlantParams& p, const ClockSpring& s,
                                   const arm::WristRom& rom);

struct StepInputs {
  double motor_tension = 0.0;  // N, at the motor capstan
  double moment_arm = 0.015;   // m, joint pulley radius
  double dt = 0.01;
};

// One linearly implicit Euler step: damping and spring stiffness are taken
// at the new velocity, gravity and the motor at the start of the step. The
// result is clamped to the ROM stops with the velocity zeroed on contact.
// Throws std::invalid_argument unless dt is in (0, 0.1] and rom is valid.
PlantState step_plant(const WristPlantParams& p, const ClockSpring& s, const TendonPath& path,
                      const PlantState& st, const StepInputs& in, const arm::Pose& wrist_frame,
                      const arm::WristRom& rom);

// Converts a position-controller output into motor tension. The controller
// output is scaled to torque and added to a static feedforward that cancels
// spring and gravity at the current angle; the resulting tension is then
// limited so the next-step joint speed stays within speed_max.
struct DriveParams {
  double torque_per_unit = 0.006;  // N m per controller unit
  double moment_arm = 0.015;       // m
  double tension_max = 150.0;      // N
  double speed_max = 0.2;          // rad/s
  bool feedforward = true;

  void validate() const;
};

double drive_tension(const DriveParams& d, const WristPlantParams& p, const ClockSpring& s,
                     const TendonPath& path, const PlantState& st, double controller_output,
                     const arm::Pose& wrist_frame, double dt);

}  // namespace exowrist::actuation
