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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "exowrist/policy.hpp"
#include "exowrist/teleop.hpp"
#include "exowrist/wire.hpp"

using namespace exowrist;
using namespace exowrist::teleop;

TEST(MapInput, ZeroInZeroOut) {
  const auto m = map_input({}, {});
  EXPECT_EQ(m.hand_v, arm::Vec3::Zero());
  EXPECT_EQ(m.ps_rate, 0.0);
  EXPECT_EQ(m.dev_rate, 0.0);
  EXPECT_EQ(m.grasp_event, GraspEvent::none);
}

TEST(MapInput, FullDeflectionHitsHandCap) {
  OperatorCommand c;
  c.v_xy = {1.0, 0.0};
  const auto m = map_input(c, {});
  EXPECT_NEAR(m.hand_v.x(), 0.04, 1e-15);
  EXPECT_EQ(m.hand_v.y(), 0.0);
  EXPECT_EQ(m.hand_v.z(), 0.0);
}

TEST(MapInput, FullPaddleHitsWristCap) {
  OperatorCommand c;
  c.wrist_dev_vel = -1.0;
  c.wrist_ps_vel = 1.0;
  const auto m = map_input(c, {});
  EXPECT_NEAR(m.dev_rate, -0.2, 1e-15);
  EXPECT_NEAR(m.ps_rate, 0.2, 1e-15);
}

TEST(MapInput, InsideDeadzoneIsZero) {
  OperatorCommand c;
  c.v_z = 0.03;
  c.v_xy = {-0.05, 0.049};
  EXPECT_EQ(map_input(c, {}).hand_v, arm::Vec3::Zero());
}

TEST(MapInput, LinearOutsideDeadzone) {
  EXPECT_NEAR(apply_deadzone(0.525), 0.5, 1e-15);
  EXPECT_NEAR(apply_deadzone(-0.525), -0.5, 1e-15);
}

TEST(MapInput, GraspEventPassesThrough) {
  OperatorCommand c;
  c.grasp_event = GraspEvent::release;
  EXPECT_EQ(map_input(c, {}).grasp_event, GraspEvent::release);
}

TEST(MapInput, RejectsOutOfRange) {
  OperatorCommand c;
  c.v_xy = {1.01, 0.0};
  EXPECT_THROW(map_input(c, {}), std::invalid_argument);
  c.v_xy = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(map_input(c, {}), std::invalid_argument);
}

TEST(MapInput, OddSymmetry) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    OperatorCommand c;
    c.set_axes({u(rng), u(rng), u(rng), u(rng), u(rng)});
    OperatorCommand neg;
    auto a = c.axes();
    for (double& x : a) x = -x;
    neg.set_axes(a);
    const auto p = map_input(c, {});
    const auto n = map_input(neg, {});
    ASSERT_EQ(p.hand_v, -n.hand_v);
    ASSERT_EQ(p.ps_rate, -n.ps_rate);
    ASSERT_EQ(p.dev_rate, -n.dev_rate);
    ASSERT_LE(p.hand_v.cwiseAbs().maxCoeff(), 0.04);
  }
}

TEST(Staleness, DecaysToZeroAfterTimeout) {
  StalenessGuard g(0.2);
  EXPECT_TRUE(g.stale(0.0));
  OperatorCommand c;
  c.v_xy = {0.5, 0.0};
  g.on_command(c, 1.0);
  EXPECT_EQ(g.current(1.1).v_xy[0], 0.5);
  EXPECT_FALSE(g.stale(1.2));
  EXPECT_TRUE(g.stale(1.21));
  EXPECT_TRUE(g.current(1.3).is_zero());
}

TEST(Staleness, GraspEventDeliveredOnce) {
  StalenessGuard g;
  OperatorCommand c;
  c.grasp_event = GraspEvent::grasp;
  g.on_command(c, 0.0);
  EXPECT_EQ(g.current(0.01).grasp_event, GraspEvent::grasp);
  EXPECT_EQ(g.current(0.02).grasp_event, GraspEvent::none);
}

namespace {

task::TaskSpec two_point_task() {
  task::TaskSpec t;
  t.kind = task::TaskKind::drinking;
  t.waypoints = {{task::Phase::approach, {0.3, 0.0, 0.0}}, {task::Phase::grasp, {0.3, 0.1, 0.0}}};
  return t;
}

PolicyParams quiet_params() {
  PolicyParams p;
  p.noise_sd = 0.0;
  p.reaction_min = p.reaction_max = 0.0;
  return p;
}

}  // namespace

TEST(Policy, FarWaypointSaturates) {
  Rng rng(1);
  ScriptedPolicy pol(quiet_params(), two_point_task(), task::Condition::wrist_locked, rng);
  SimSnapshot s;
  s.t = 0.5;
  s.hand = {0.0, 0.0, 0.0};
  const auto c = pol.step(s, rng);
  EXPECT_NEAR(c.v_xy[0], 1.0, 1e-15);
  EXPECT_EQ(c.v_xy[1], 0.0);
  EXPECT_EQ(c.wrist_dev_vel, 0.0);
}

TEST(Policy, ArrivalAdvancesAndStops) {
  Rng rng(1);
  ScriptedPolicy pol(quiet_params(), two_point_task(), task::Condition::wrist_locked, rng);
  SimSnapshot s;
  s.t = 0.5;
  s.hand = {0.302, 0.0, 0.0};
  const auto c = pol.step(s, rng);
  EXPECT_TRUE(c.is_zero());
  EXPECT_EQ(pol.waypoint_index(), 1u);
  // Grasp issued on arriving at the grasp waypoint.
  s.t = 10.0;
  s.hand = {0.3, 0.1, 0.001};
  EXPECT_EQ(pol.step(s, rng).grasp_event, GraspEvent::grasp);
  EXPECT_TRUE(pol.finished());
}

TEST(Policy, SameSeedSameCommands) {
  auto run = [] {
    Rng rng(77);
    PolicyParams p;
    ScriptedPolicy pol(p, two_point_task(), task::Condition::wrist_enabled, rng);
    std::vector<std::array<double, 5>> out;
    SimSnapshot s;
    for (int i = 0; i < 300; ++i) {
      s.t = i * 0.01;
      const auto c = pol.step(s, rng);
      for (int k = 0; k < 3; ++k) s.hand[k] += c.axes()[k] * 0.0004;
      out.push_back(c.axes());
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

using namespace exowrist::wire;

namespace {

Message random_message(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<int> kind(0, 4);
  std::bernoulli_distribution coin;
  Message m;
  m.seq = rng() >> 12;
  switch (kind(rng)) {
    case 0:
      m.payload = Hello{1, coin(rng) ? "operator" : "observer", 1 + static_cast<int>(rng() % 10)};
      break;
    case 1: {
      Command c;
      for (double& a : c.axes) a = u(rng) / 1e3;
      c.buttons = {coin(rng), coin(rng)};
      c.t = std::abs(u(rng));
      m.payload = c;
      break;
    }
    case 2: {
      State s;
      s.t = std::abs(u(rng));
      for (double& a : s.q_deg) a = u(rng);
      s.grasp = coin(rng) ? 1.0 : 0.0;
      for (double& a : s.hand_pos_m) a = u(rng) / 1e3;
      s.tilt_deg = u(rng);
      s.tilt_corr_deg = u(rng);
      s.theta_ref_deg = u(rng);
      s.condition = coin(rng) ? "wrist_enabled" : "wrist_locked";
      s.flags = {coin(rng), coin(rng), coin(rng), coin(rng)};
      m.payload = s;
      break;
    }
    case 3:
      m.payload = Event{coin(rng) ? "grasp" : "estop \"quoted\" é", std::abs(u(rng))};
      break;
    default:
      m.payload = ErrorMsg{"bad_seq", "line\nbreak and \\ slash"};
  }
  return m;
}

}  // namespace

TEST(Wire, RandomRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5000; ++i) {
    const Message m = random_message(rng);
    const std::string line = encode(m);
    ASSERT_EQ(line.back(), '\n');
    ASSERT_EQ(line.find('\n'), line.size() - 1);
    ASSERT_EQ(decode(line), m);
  }
}

TEST(Wire, CommandWireForm) {
  Message m;
  m.seq = 3;
  Command c;
  c.axes = {0.5, 0, 0, 0, -1};
  c.t = 1.25;
  m.payload = c;
  EXPECT_EQ(encode(m),
            "{\"kind\":\"command\",\"payload\":{\"axes\":[0.5,0.0,0.0,0.0,-1.0],\"buttons\":{\"grasp\":false,"
            "\"release\":false},\"t\":1.25},\"seq\":3}\n");
}

TEST(Wire, TruncatedLineIsProtocolError) {
  Message m;
  m.payload = Event{"grasp", 1.0};
  std::string line = encode(m);
  line.resize(line.size() / 2);
  EXPECT_THROW(decode(line), ProtocolError);
}

TEST(Wire, UnknownFieldIgnored) {
  const auto m = decode(R"({"kind":"event","seq":4,"payload":{"name":"grasp","t":2.5,"extra":[1,2]},"v":9})");
  EXPECT_EQ(m.seq, 4u);
  EXPECT_EQ(std::get<Event>(m.payload), (Event{"grasp", 2.5}));
}

TEST(Wire, UnknownKindRejected) {
  EXPECT_THROW(decode(R"({"kind":"teleport","seq":1,"payload":{}})"), ProtocolError);
}

TEST(Wire, BadFieldsRejected) {
  EXPECT_THROW(decode(R"({"kind":"event","seq":-1,"payload":{"name":"x","t":0}})"), ProtocolError);
  EXPECT_THROW(decode(R"({"kind":"command","seq":1,"payload":{"axes":[1,2],"t":0}})"), ProtocolError);
  EXPECT_THROW(decode(R"({"kind":"hello","seq":1,"payload":{"version":"1","role":"operator"}})"), ProtocolError);
  EXPECT_THROW(decode(R"([1,2,3])"), ProtocolError);
}

TEST(Wire, HelloDecimationDefaultsToOne) {
  const auto m = decode(R"({"kind":"hello","seq":0,"payload":{"version":1,"role":"observer"}})");
  EXPECT_EQ(std::get<Hello>(m.payload).decimation, 1);
}

TEST(Wire, SeqMustIncrease) {
  SeqChecker c;
  Message m;
  m.payload = Event{"x", 0};
  m.seq = 5;
  c.check(m);
  m.seq = 6;
  c.check(m);
  EXPECT_THROW(c.check(m), ProtocolError);
  m.seq = 2;
  EXPECT_THROW(c.check(m), ProtocolError);
}

TEST(Wire, LineBufferSplitsAcrossChunks) {
  LineBuffer b;
  b.append("{\"a\":1}\n{\"b\"");
  EXPECT_EQ(b.next_line(), "{\"a\":1}");
  EXPECT_EQ(b.next_line(), std::nullopt);
  b.append(":2}\n\n");
  EXPECT_EQ(b.next_line(), "{\"b\":2}");
  EXPECT_EQ(b.next_line(), "");
  EXPECT_EQ(b.next_line(), std::nullopt);
}

TEST(Wire, LineBufferCapsPendingTail) {
  LineBuffer b(16);
  b.append(std::string(17, 'x'));
  EXPECT_THROW(b.next_line(), ProtocolError);
  // Usable again afterwards.
  b.append("ok\n");
  EXPECT_EQ(b.next_line(), "ok");
}
