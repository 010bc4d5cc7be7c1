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

#include "exowrist/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exowrist::teleop {

void PolicyParams::validate() const {
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("policy: noise_sd must be >= 0");
  if (!(arrive_tol > 0.0) || !(slow_radius > arrive_tol)) {
    throw std::invalid_argument("policy: need 0 < arrive_tol < slow_radius");
  }
  if (!(reaction_min >= 0.0 && reaction_max >= reaction_min)) throw std::invalid_argument("policy: bad reaction range");
  if (!(dwell_min >= 0.0 && dwell_max >= dwell_min)) throw std::invalid_argument("policy: bad dwell range");
  if (!(speed_scale > 0.0 && speed_scale <= 1.0)) throw std::invalid_argument("policy: speed_scale must be in (0, 1]");
  if (!(relevel_skip_prob >= 0.0 && relevel_skip_prob <= 1.0)) {
    throw std::invalid_argument("policy: relevel_skip_prob must be in [0, 1]");
  }
}

ScriptedPolicy::ScriptedPolicy(const PolicyParams& params, task::TaskSpec task, task::Condition condition,
                               Rng& rng)
    : params_(params), task_(std::move(task)), condition_(condition) {
  params_.validate();
  task_.validate();
  hold_until_ = rng.uniform(params_.reaction_min, params_.reaction_max);
  skip_relevel_ = rng.uniform() < params_.relevel_skip_prob;
}

double ScriptedPolicy::reference_target() const {
  if (condition_ != task::Condition::wrist_enabled || task_.kind != task::TaskKind::scratch_level) return 0.0;
  if (finished()) return 0.0;
  const task::Phase phase = task_.waypoints[index_].phase;
  if (phase == task::Phase::target_contact) return params_.scratch_lean;
  if (phase == task::Phase::release && skip_relevel_) return params_.scratch_lean;
  return 0.0;
}

OperatorCommand ScriptedPolicy::step(const SimSnapshot& snap, Rng& rng) {
  OperatorCommand cmd;
  cmd.timestamp = snap.t;
  if (finished() || snap.t < hold_until_) return cmd;

  const task::Waypoint& wp = task_.waypoints[index_];
  const arm::Vec3 error = wp.position - snap.hand;
  const double distance = error.norm();
  if (distance < params_.arrive_tol) {
    if (wp.phase == task::Phase::grasp && !snap.grasped) cmd.grasp_event = GraspEvent::grasp;
    if (wp.phase == task::Phase::release && snap.grasped) cmd.grasp_event = GraspEvent::release;
    ++index_;
    hold_until_ = snap.t + rng.uniform(params_.dwell_min, params_.dwell_max);
    return cmd;
  }

  const double magnitude = std::min(1.0, distance / params_.slow_radius) * params_.speed_scale;
  const arm::Vec3 v = error / distance * magnitude;
  std::array<double, 5> axes{};
  for (int i = 0; i < 3; ++i) axes[i] = std::clamp(v[i] + rng.normal(0.0, params_.noise_sd), -1.0, 1.0);

  // Paddle: steer the leveling reference, proportional with saturation.
  const double ref_error = reference_target() - snap.theta_ref;
  if (std::abs(ref_error) > params_.ref_tol) {
    axes[4] = std::clamp(ref_error / params_.ref_slow, -1.0, 1.0);
  }
  cmd.set_axes(axes);
  return cmd;
}

}  // namespace exowrist::teleop
