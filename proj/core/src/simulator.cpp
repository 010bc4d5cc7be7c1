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

#include "exowrist/simulator.hpp"

#include <cmath>

#include "exowrist/units.hpp"

namespace exowrist::trials {

double quantize(double x) { return std::round(x * 1e6) / 1e6 + 0.0; }

Simulator::Simulator(const SimParams& params, Condition condition, const RomDeg& rom,
                     const task::TaskSpec& task, std::uint64_t grip_seed)
    : params_(params), condition_(condition), rom_(rom.to_rad()), task_(task) {
  if (!rom_.valid()) throw ConfigError("rom: adduction_min must be below abduction_max");
  params_.geometry.validate();
  params_.plant.validate();
  params_.tendon.validate();
  params_.drive.validate();
  params_.pid.validate();
  spring_ = params_.spring(rom_);
  spring_.validate();

  limits_.hand_speed_max = params_.hand_speed_max;
  limits_.wrist_speed_max = params_.wrist_speed_max;
  limits_.wrist_rom = rom_;
  limits_.validate();
  params_.drive.speed_max = limits_.wrist_speed_max;

  leveling_.k_lev = params_.k_lev;
  leveling_.enabled = condition_ == Condition::wrist_enabled;
  leveling_.validate();

  q_.set_proximal(params_.start_posture);

  Rng grip_rng(grip_seed);
  grip_capacity_ = grip_rng.truncated_normal(params_.grip.capacity_mean, params_.grip.capacity_sd, 3.0);
}

double Simulator::time() const { return quantize(static_cast<double>(tick_) * params_.dt); }

void Simulator::set_estop(bool on) {
  estop_ = on;
  if (on) plant_.theta_dot = 0.0;
}

teleop::SimSnapshot Simulator::snapshot() const {
  teleop::SimSnapshot s;
  s.t = time();
  s.hand = arm::forward_kinematics(params_.geometry, q_).position;
  s.theta_ref = leveling_.theta_ref;
  s.grasped = holding_;
  return s;
}

Sample Simulator::make_sample(const arm::ChainFrames& f, const arm::CupTilt& tilt) const {
  Sample s;
  s.t = time();
  const auto prox = q_.proximal();
  for (std::size_t i = 0; i < prox.size(); ++i) s.q_deg[i] = quantize(rad2deg(prox[i]));
  s.q_deg[4] = quantize(rad2deg(q_.wrist_dev));
  s.grasp = holding_ ? 1.0 : 0.0;
  for (int i = 0; i < 3; ++i) s.hand[i] = quantize(f.hand.position[i]);
  const arm::Quat& o = f.hand.orientation;
  s.quat = {quantize(o.w()), quantize(o.x()), quantize(o.y()), quantize(o.z())};
  s.tilt_total_deg = quantize(rad2deg(tilt.total));
  s.tilt_corr_deg = quantize(rad2deg(tilt.correctable));
  s.theta_ref_deg = quantize(rad2deg(leveling_.theta_ref));
  return s;
}

Sample Simulator::observe() const {
  const arm::ChainFrames f = arm::chain_frames(params_.geometry, q_);
  return make_sample(f, arm::cup_tilt(f.hand));
}

Simulator::Tick Simulator::step(const teleop::OperatorCommand& raw) {
  const arm::ChainFrames frames = arm::chain_frames(params_.geometry, q_);
  const arm::CupTilt tilt = arm::cup_tilt(frames.hand);
  const double t = time();

  Tick tick;
  teleop::OperatorCommand cmd = raw;
  if (estop_) cmd = teleop::OperatorCommand{};
  const teleop::MappedInput in = teleop::map_input(cmd, limits_);

  // Grasp state changes take effect at this sample.
  if (in.grasp_event == teleop::GraspEvent::grasp && !holding_) {
    holding_ = true;
    tick.events.push_back({"grasp", t});
  } else if (in.grasp_event == teleop::GraspEvent::release && holding_) {
    holding_ = false;
    tick.events.push_back({"release", t});
    if (task_.kind == TaskKind::scratch_level) tick.events.push_back({"placement", t});
    tick.terminal = true;
  }
  if (holding_ && task_.kind == TaskKind::scratch_level &&
      params_.grip.load(tilt.total) > grip_capacity_) {
    holding_ = false;
    tick.events.push_back({"release", t});
    tick.terminal = true;
  }

  tick.sample = make_sample(frames, tilt);
  tick.sample.cmd = cmd.axes();
  for (double& c : tick.sample.cmd) c = quantize(c);

  if (estop_) {
    ++tick_;
    return tick;
  }

  const control::SafeCommand safe = control::apply_safety(limits_, q_, in.hand_v, 0.0);

  bool rom_flag = false;
  double next_wrist = 0.0;
  if (condition_ == Condition::wrist_enabled) {
    const double dt = params_.dt;
    const double inc = control::leveling_step(leveling_, tilt.correctable, in.dev_rate * dt,
                                              limits_.wrist_speed_max, dt);
    const double wanted = setpoint_ + inc;
    setpoint_ = rom_.clamp(wanted);
    rom_flag = setpoint_ != wanted;

    const control::PidOutput u = control::pid_step(params_.pid, pid_, setpoint_, plant_.theta, dt);
    pid_ = u.state;
    actuation::StepInputs step;
    step.dt = dt;
    step.moment_arm = params_.drive.moment_arm;
    step.motor_tension = actuation::drive_tension(params_.drive, params_.plant, spring_, params_.tendon,
                                                  plant_, u.command, frames.wrist, dt);
    plant_ = actuation::step_plant(params_.plant, spring_, params_.tendon, plant_, step, frames.wrist, rom_);
    rom_flag = rom_flag || plant_.at_stop;
    next_wrist = plant_.theta;
  }

  // Proximal joints: Cartesian rate through damped least squares. The hand
  // displacement the wrist is about to cause is subtracted so the hand point
  // follows the operator's command whether or not the wrist moves.
  arm::JointConfig wrist_moved = q_;
  wrist_moved.wrist_dev = next_wrist;
  const arm::Vec3 wrist_shift = arm::forward_kinematics(params_.geometry, wrist_moved).position - frames.hand.position;
  const arm::Vec3 v_prox = safe.hand_v - wrist_shift / params_.dt;
  control::JointRates dq = control::resolved_rate(params_.geometry, wrist_moved, v_prox, params_.dls_lambda);
  dq[3] += in.ps_rate;

  const double scale = control::limit_hand_step(params_.geometry, q_, dq * params_.dt, next_wrist,
                                                 limits_.hand_speed_max * params_.dt);
  const arm::ProximalAngles prox = q_.proximal();
  arm::ProximalAngles next{};
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = prox[i] + scale * dq[static_cast<Eigen::Index>(i)] * params_.dt;
  q_.set_proximal(next);
  q_.wrist_dev = next_wrist;
  q_.grasp = holding_ ? 1.0 : 0.0;

  tick.sample.flag_speed = safe.flags.any_speed() || scale < 1.0 ? 1 : 0;
  tick.sample.flag_rom = rom_flag || safe.flags.rom ? 1 : 0;
  ++tick_;
  return tick;
}

}  // namespace exowrist::trials
