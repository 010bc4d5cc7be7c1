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

// Serial-chain kinematics of the arm exoskeleton.
//
// Frame convention (world and base share it): x forward, y to the user's
// left, z up; the base frame sits at the shoulder center. In the zero
// configuration the arm points straight forward along +x with the palm
// facing medially (+y) and the thumb up, so the hand frame coincides with
// the world frame and its +z axis is the cup-up axis.
//
// Joint axes, proximal to distal:
//   passive shoulder ab-ad   +x (fixed per session, applied first)
//   shoulder flexion-ext.    +y
//   shoulder int.-ext. rot.  humerus long axis (+x of the upper-arm frame)
//   elbow flexion-ext.       +y of the upper-arm frame
//   forearm pron.-sup.       forearm long axis (+x of the forearm frame)
//   wrist deviation          palm normal through the wrist center; positive
//                            deviation (abduction, radial) raises the thumb
//                            side, i.e. rotates about -y of the forearm frame
//
// Positive rotation about +y lowers a forward-pointing link, so elbow
// flexion from the zero pose is a negative elbow angle.

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace exowrist::arm {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Jacobian = Eigen::Matrix<double, 3, 4>;

struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  static Pose identity() { return {}; }

  // this * other, renormalized.
  Pose compose(const Pose& other) const;
  Vec3 transform(const Vec3& p) const { return position + orientation * p; }
  Eigen::Matrix3d rotation() const { return orientation.toRotationMatrix(); }
};

inline constexpr std::size_t kProximalJoints = 4;
using ProximalAngles = std::array<double, kProximalJoints>;

struct JointConfig {
  double shoulder_fe = 0.0;
  double shoulder_ie = 0.0;
  double elbow_fe = 0.0;
  double forearm_ps = 0.0;
  double wrist_dev = 0.0;  // positive = abduction (radial deviation)
  double grasp = 0.0;      // 0 open .. 1 closed

  ProximalAngles proximal() const { return {shoulder_fe, shoulder_ie, elbow_fe, forearm_ps}; }
  void set_proximal(const ProximalAngles& q);
  bool finite() const;
};

// Wrist ab-ad travel; shared by the mechanical stops and the software limits.
struct WristRom {
  double adduction_min;  // rad, negative
  double abduction_max;  // rad, positive

  bool valid() const { return adduction_min < abduction_max; }
  bool contains(double theta) const { return theta >= adduction_min && theta <= abduction_max; }
  double clamp(double theta) const;
};

// Device travel: 30 deg abduction, 40 deg adduction.
WristRom device_wrist_rom();

struct ChainGeometry {
  double upper_arm_len = 0.30;
  double forearm_len = 0.25;
  double hand_len = 0.08;
  double shoulder_abad_fixed = 0.0;
  Pose base;  // shoulder center in world

  void validate() const;
  double reach() const { return upper_arm_len + forearm_len + hand_len; }
};

// Intermediate frames of one configuration, all in world coordinates.
struct ChainFrames {
  Pose upper_arm;  // at the shoulder center, after FE and IE
  Pose forearm;    // at the elbow, after elbow FE and forearm PS
  Pose wrist;      // at the wrist center, forearm orientation (pre-deviation)
  Pose hand;       // hand center, full orientation
};

ChainFrames chain_frames(const ChainGeometry& geom, const JointConfig& q);

// Throws std::invalid_argument on non-finite angles or invalid geometry.
Pose forward_kinematics(const ChainGeometry& geom, const JointConfig& q);

// Columns: d(hand position)/d(shoulder FE, shoulder IE, elbow FE, forearm PS).
Jacobian positional_jacobian(const ChainGeometry& geom, const JointConfig& q);

// Wrist deviation axis (positive direction) expressed in the hand frame.
// Constant because the deviation rotation leaves its own axis fixed.
Vec3 deviation_axis_in_hand();

struct CupTilt {
  double total = 0.0;        // angle between cup-up axis and world up, [0, pi]
  double correctable = 0.0;  // signed component about the deviation axis, (-pi, pi]
  bool degenerate = false;   // deviation axis parallel to world up
};

CupTilt cup_tilt(const Pose& hand);

struct WristSolution {
  double deviation = 0.0;
  bool clamped = false;
  bool degenerate = false;
};

// Wrist deviation that brings the correctable tilt to theta_ref with the
// given proximal joints; clamped to rom and flagged when out of reach.
WristSolution required_wrist_deviation(const ChainGeometry& geom, const ProximalAngles& q_proximal,
                                       double theta_ref, const WristRom& rom);

}  // namespace exowrist::arm
