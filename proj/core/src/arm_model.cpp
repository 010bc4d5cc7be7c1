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

#include "exowrist/arm_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exowrist/units.hpp"

namespace exowrist::arm {
namespace {

using Eigen::AngleAxisd;

Quat rot(double angle, const Vec3& axis) { return Quat(AngleAxisd(angle, axis)); }

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

}  // namespace

Pose Pose::compose(const Pose& other) const {
  Pose out;
  out.position = position + orientation * other.position;
  out.orientation = (orientation * other.orientation).normalized();
  return out;
}

void JointConfig::set_proximal(const ProximalAngles& q) {
  shoulder_fe = q[0];
  shoulder_ie = q[1];
  elbow_fe = q[2];
  forearm_ps = q[3];
}

bool JointConfig::finite() const {
  return std::isfinite(shoulder_fe) && std::isfinite(shoulder_ie) && std::isfinite(elbow_fe) &&
         std::isfinite(forearm_ps) && std::isfinite(wrist_dev) && std::isfinite(grasp);
}

double WristRom::clamp(double theta) const { return std::clamp(theta, adduction_min, abduction_max); }

WristRom device_wrist_rom() { return {deg2rad(-40.0), deg2rad(30.0)}; }

void ChainGeometry::validate() const {
  if (!(upper_arm_len > 0.0) || !(forearm_len > 0.0) || !(hand_len > 0.0)) {
    throw std::invalid_argument("chain geometry: link lengths must be positive");
  }
  if (!std::isfinite(shoulder_abad_fixed) || !base.position.allFinite() ||
      !base.orientation.coeffs().allFinite()) {
    throw std::invalid_argument("chain geometry: non-finite base pose or shoulder ab-ad");
  }
}

ChainFrames chain_frames(const ChainGeometry& geom, const JointConfig& q) {
  const Vec3 x = Vec3::UnitX();
  const Vec3 y = Vec3::UnitY();

  ChainFrames f;
  const Quat shoulder = (geom.base.orientation * rot(geom.shoulder_abad_fixed, x)).normalized();

  f.upper_arm.position = geom.base.position;
  f.upper_arm.orientation = (shoulder * rot(q.shoulder_fe, y) * rot(q.shoulder_ie, x)).normalized();

  f.forearm.position = f.upper_arm.transform(Vec3(geom.upper_arm_len, 0.0, 0.0));
  f.forearm.orientation =
      (f.upper_arm.orientation * rot(q.elbow_fe, y) * rot(q.forearm_ps, x)).normalized();

  f.wrist.position = f.forearm.transform(Vec3(geom.forearm_len, 0.0, 0.0));
  f.wrist.orientation = f.forearm.orientation;

  f.hand.orientation = (f.wrist.orientation * rot(q.wrist_dev, -y)).normalized();
  f.hand.position = f.wrist.position + f.hand.orientation * Vec3(geom.hand_len, 0.0, 0.0);
  return f;
}

Pose forward_kinematics(const ChainGeometry& geom, const JointConfig& q) {
  geom.validate();
  if (!q.finite()) throw std::invalid_argument("forward_kinematics: non-finite joint angle");
  return chain_frames(geom, q).hand;
}

Jacobian positional_jacobian(const ChainGeometry& geom, const JointConfig& q) {
  geom.validate();
  if (!q.finite()) throw std::invalid_argument("positional_jacobian: non-finite joint angle");

  const Vec3 x = Vec3::UnitX();
  const Vec3 y = Vec3::UnitY();
  const ChainFrames f = chain_frames(geom, q);
  const Quat shoulder = geom.base.orientation * rot(geom.shoulder_abad_fixed, x);
  const Vec3& p_hand = f.hand.position;
  const Vec3& p_shoulder = f.upper_arm.position;
  const Vec3& p_elbow = f.forearm.position;

  const Vec3 a_fe = shoulder * y;
  const Vec3 a_ie = f.upper_arm.orientation * x;
  const Vec3 a_elbow = f.upper_arm.orientation * y;
  const Vec3 a_ps = f.forearm.orientation * x;

  Jacobian j;
  j.col(0) = a_fe.cross(p_hand - p_shoulder);
  j.col(1) = a_ie.cross(p_hand - p_shoulder);
  j.col(2) = a_elbow.cross(p_hand - p_elbow);
  j.col(3) = a_ps.cross(p_hand - p_elbow);
  return j;
}

Vec3 deviation_axis_in_hand() { return -Vec3::UnitY(); }

CupTilt cup_tilt(const Pose& hand) {
  const Eigen::Matrix3d r = hand.rotation();
  const Vec3 up = Vec3::UnitZ();
  const Vec3 cup_up = r.col(2);
  const Vec3 axis = r * deviation_axis_in_hand();

  CupTilt t;
  t.total = std::atan2(cup_up.cross(up).norm(), cup_up.dot(up));

  // World up projected onto the plane the deviation joint sweeps.
  const Vec3 up_in_plane = up - up.dot(axis) * axis;
  const double n = up_in_plane.norm();
  if (n < 1e-9) {
    t.degenerate = true;
    return t;
  }
  const Vec3 level = up_in_plane / n;
  t.correctable = wrap_angle(std::atan2(axis.dot(level.cross(cup_up)), level.dot(cup_up)));
  return t;
}

WristSolution required_wrist_deviation(const ChainGeometry& geom, const ProximalAngles& q_proximal,
                                       double theta_ref, const WristRom& rom) {
  JointConfig q;
  q.set_proximal(q_proximal);
  q.wrist_dev = 0.0;
  const CupTilt tilt = cup_tilt(forward_kinematics(geom, q));

  WristSolution s;
  s.degenerate = tilt.degenerate;
  if (tilt.degenerate) return s;
  // Deviation rotates the cup about the deviation axis one-for-one.
  const double wanted = wrap_angle(theta_ref - tilt.correctable);
  s.deviation = rom.clamp(wanted);
  s.clamped = s.deviation != wanted;
  return s;
}

}  // namespace exowrist::arm
