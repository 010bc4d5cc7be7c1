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
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "exowrist/simulator.hpp"
#include "exowrist/trials.hpp"
#include "exowrist/units.hpp"
#include "test_support.hpp"

using namespace exowrist;
using namespace exowrist::trials;
using exowrist::testing::TempDir;

namespace {

TrialConfig config_for(TaskKind kind, Condition cond, std::uint64_t seed) {
  TrialConfig c;
  c.participant_id = "P01";
  c.condition = cond;
  c.seed = seed;
  Rng rng(derive_seed(seed, 0));
  c.task = task::build_task(kind, {}, rng);
  return c;
}

// Synthetic drinking record: grasp at 0.5 s, release at 3.0 s, given tilt profile.
TrialRecord drinking_record(const std::function<double(double)>& tilt_deg) {
  TrialRecord r;
  r.config = config_for(TaskKind::drinking, Condition::wrist_enabled, 1);
  r.config.task.fill_level = 0.8;
  for (int k = 0; k <= 400; ++k) {
    Sample s;
    s.t = k * 0.01;
    s.tilt_total_deg = tilt_deg(s.t);
    r.samples.push_back(s);
  }
  r.events = {{"grasp", 0.5}, {"release", 3.0}};
  return r;
}

// Synthetic scratch record placed at the marker with the given tilt about y.
TrialRecord scratch_record(double tilt_deg, double marker_offset) {
  TrialRecord r;
  r.config = config_for(TaskKind::scratch_level, Condition::wrist_enabled, 1);
  const auto& t = r.config.task;
  const arm::Quat o(Eigen::AngleAxisd(deg2rad(tilt_deg), arm::Vec3::UnitY()));
  const arm::Vec3 hand = t.marker + o * arm::Vec3(0.0, 0.0, t.stick_base_offset) + arm::Vec3(marker_offset, 0, 0);
  for (int k = 0; k <= 300; ++k) {
    Sample s;
    s.t = k * 0.01;
    s.quat = {o.w(), o.x(), o.y(), o.z()};
    for (int i = 0; i < 3; ++i) s.hand[i] = hand[i];
    s.tilt_total_deg = std::abs(tilt_deg);
    r.samples.push_back(s);
  }
  r.events = {{"grasp", 0.5}, {"placement", 2.5}, {"release", 2.5}};
  return r;
}

// All-zero rows; cmd_vx is 0.5 from command_from onwards.
std::string hand_csv(const std::vector<double>& times, double command_from = 1e9) {
  std::string out;
  for (std::size_t i = 0; i < kLogColumns.size(); ++i) out += (i ? "," : "") + std::string(kLogColumns[i]);
  out += "\n";
  for (double t : times) {
    out += std::to_string(t);
    for (std::size_t i = 1; i < kLogColumns.size(); ++i) {
      out += i == 10 ? ",1" : (i == 17 && t >= command_from - 1e-9) ? ",0.5" : ",0";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

TEST(Schedule, CountsPerParticipant) {
  const auto parts = default_participants();
  ASSERT_EQ(parts.size(), 8u);
  const auto sched = randomize_schedule(parts, 42);
  ASSERT_EQ(sched.size(), 8u * 2 * 2 * 4);
  std::map<std::tuple<std::string, Condition, TaskKind>, int> n;
  for (const auto& c : sched) ++n[{c.participant_id, c.condition, c.task.kind}];
  EXPECT_EQ(n.size(), 8u * 2 * 2);
  for (const auto& [key, count] : n) EXPECT_EQ(count, 4);
  // 32 trials per condition and task across the cohort.
  int locked_drinking = 0;
  for (const auto& c : sched) locked_drinking += c.condition == Condition::wrist_locked && c.task.kind == TaskKind::drinking;
  EXPECT_EQ(locked_drinking, 32);
}

TEST(Schedule, Deterministic) { EXPECT_EQ(randomize_schedule(default_participants(), 7), randomize_schedule(default_participants(), 7)); }

TEST(Schedule, ConditionBlocksAreContiguous) {
  const auto sched = randomize_schedule(default_participants(), 3);
  for (std::size_t p = 0; p < 8; ++p) {
    for (std::size_t i = 0; i < 16; ++i) {
      const auto& c = sched[p * 16 + i];
      EXPECT_EQ(c.condition, sched[p * 16 + (i < 8 ? 0 : 8)].condition);
      EXPECT_EQ(c.trial_index, static_cast<int>(p * 16 + i));
    }
  }
}

TEST(Schedule, BothOrdersOccurOverSeeds) {
  std::set<Condition> first;
  int enabled_first = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    ScheduleOptions opt;
    opt.trials_per_condition = 1;
    opt.tasks = {TaskKind::drinking};
    const auto c = randomize_schedule(default_participants(), seed, opt).front().condition;
    first.insert(c);
    enabled_first += c == Condition::wrist_enabled;
  }
  EXPECT_EQ(first.size(), 2u);
  // Fair coin: 1000 draws land within 4.5 sd of 500.
  EXPECT_NEAR(enabled_first, 500, 72);
}

TEST(Schedule, RejectsEmpty) { EXPECT_THROW(randomize_schedule({}, 1), std::invalid_argument); }

TEST(RunTrial, SameSeedIdenticalRecord) {
  for (TaskKind kind : {TaskKind::drinking, TaskKind::scratch_level}) {
    const auto cfg = config_for(kind, Condition::wrist_enabled, 5);
    EXPECT_EQ(run_trial(cfg), run_trial(cfg));
  }
}

TEST(RunTrial, LockedWristStaysNeutral) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (TaskKind kind : {TaskKind::drinking, TaskKind::scratch_level}) {
      const auto rec = run_trial(config_for(kind, Condition::wrist_locked, seed));
      for (const auto& s : rec.samples) ASSERT_EQ(s.q_deg[4], 0.0);
    }
  }
}

TEST(RunTrial, SamplesAtHundredHertz) {
  const auto rec = run_trial(config_for(TaskKind::drinking, Condition::wrist_enabled, 2));
  ASSERT_GT(rec.samples.size(), 100u);
  for (std::size_t i = 1; i < rec.samples.size(); ++i) {
    ASSERT_NEAR(rec.samples[i].t - rec.samples[i - 1].t, 0.01, 1e-6);
  }
  const double mean = (rec.samples.back().t - rec.samples.front().t) / static_cast<double>(rec.samples.size() - 1);
  EXPECT_NEAR(mean, 0.01, 1e-4);
}

TEST(RunTrial, TimeoutBoundsSampleCount) {
  SimParams p = SimParams::defaults();
  p.policy.reaction_min = p.policy.reaction_max = 1000.0;  // operator never moves
  const auto rec = run_trial(config_for(TaskKind::drinking, Condition::wrist_enabled, 3), p);
  EXPECT_EQ(rec.samples.size(), 6001u);
  EXPECT_TRUE(rec.outcome.timed_out);
  EXPECT_DOUBLE_EQ(rec.outcome.tct, kTimeout);
}

TEST(RunTrial, GraspPrecedesRelease) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto rec = run_trial(config_for(TaskKind::scratch_level, Condition::wrist_enabled, seed));
    int held = 0;
    for (const auto& e : rec.events) {
      if (e.name == "grasp") ++held;
      if (e.name == "release") {
        ASSERT_GE(--held, 0);
      }
    }
  }
}

TEST(RunTrial, OutcomeMatchesTaskKind) {
  const auto d = run_trial(config_for(TaskKind::drinking, Condition::wrist_enabled, 4));
  EXPECT_NE(d.outcome.spill, SpillOutcome::not_applicable);
  EXPECT_EQ(d.outcome.leveling, LevelingOutcome::not_applicable);
  const auto s = run_trial(config_for(TaskKind::scratch_level, Condition::wrist_enabled, 4));
  EXPECT_EQ(s.outcome.spill, SpillOutcome::not_applicable);
  EXPECT_NE(s.outcome.leveling, LevelingOutcome::not_applicable);
  EXPECT_NE(s.outcome.leveling, LevelingOutcome::human_assisted);
}

TEST(RunTrial, UnreachableWaypointIsConfigError) {
  auto cfg = config_for(TaskKind::drinking, Condition::wrist_enabled, 1);
  cfg.task.waypoints[1].position = {3.0, 0.0, 0.0};
  EXPECT_THROW(run_trial(cfg), ConfigError);
}

TEST(Spill, LevelCupNoSpill) {
  EXPECT_EQ(classify_spill(drinking_record([](double) { return 0.0; })), SpillOutcome::no_spill);
}

TEST(Spill, HeldTiltSpills) {
  const auto r = drinking_record([](double t) { return t >= 1.0 && t < 1.2 ? 20.0 : 0.0; });
  EXPECT_EQ(classify_spill(r), SpillOutcome::spill);
}

TEST(Spill, BriefExcursionDoesNot) {
  const auto r = drinking_record([](double t) { return t >= 1.0 && t < 1.05 ? 20.0 : 0.0; });
  EXPECT_EQ(classify_spill(r), SpillOutcome::no_spill);
}

TEST(Spill, OnlyCountsWhileHeld) {
  const auto r = drinking_record([](double t) { return t > 3.1 ? 40.0 : 0.0; });
  EXPECT_EQ(classify_spill(r), SpillOutcome::no_spill);
}

TEST(Spill, ThresholdFollowsFill) {
  const SpillModel m;
  EXPECT_DOUBLE_EQ(m.threshold_deg(0.8), 15.0);
  EXPECT_DOUBLE_EQ(m.threshold_deg(0.2), 25.0);
  EXPECT_DOUBLE_EQ(m.threshold_deg(0.5), 20.0);
  EXPECT_DOUBLE_EQ(m.threshold_deg(1.0), 15.0);
}

TEST(Spill, ScratchTrialInapplicable) {
  EXPECT_THROW(classify_spill(scratch_record(0.0, 0.0)), InapplicableError);
}

TEST(Leveling, SmallTiltOnMarkerSucceeds) {
  EXPECT_EQ(classify_leveling(scratch_record(2.0, 0.0)), LevelingOutcome::exo_only_success);
}

TEST(Leveling, LargeTiltNotLeveled) {
  EXPECT_EQ(classify_leveling(scratch_record(10.0, 0.0)), LevelingOutcome::not_leveled);
}

TEST(Leveling, OffMarkerNotLeveled) {
  EXPECT_EQ(classify_leveling(scratch_record(0.0, 0.05)), LevelingOutcome::not_leveled);
}

TEST(Leveling, DropBeforePlacementIsGraspFailure) {
  auto r = scratch_record(0.0, 0.0);
  r.events = {{"grasp", 0.5}, {"release", 1.5}};
  EXPECT_EQ(classify_leveling(r), LevelingOutcome::grasp_failure);
  r.events.clear();
  EXPECT_EQ(classify_leveling(r), LevelingOutcome::grasp_failure);
}

TEST(Leveling, DrinkingTrialInapplicable) {
  EXPECT_THROW(classify_leveling(drinking_record([](double) { return 0.0; })), InapplicableError);
}

TEST(Log, RoundTripIsExact) {
  TempDir dir("log");
  for (TaskKind kind : {TaskKind::drinking, TaskKind::scratch_level}) {
    const auto rec = run_trial(config_for(kind, Condition::wrist_enabled, 9));
    write_log(rec, dir.path() / "trial");
    EXPECT_EQ(read_log(dir.path() / "trial.csv"), rec);
    EXPECT_EQ(read_log(dir.path() / "trial.json"), rec);
  }
}

TEST(Log, HeaderIsFixed) {
  const std::string csv = samples_to_csv({});
  EXPECT_EQ(csv,
            "t_s,q_sh_fe_deg,q_sh_ie_deg,q_el_fe_deg,q_fa_ps_deg,q_wr_dev_deg,grasp,hand_x_m,hand_y_m,hand_z_m,"
            "quat_w,quat_x,quat_y,quat_z,tilt_total_deg,tilt_corr_deg,theta_ref_deg,cmd_vx,cmd_vy,cmd_vz,cmd_ps,"
            "cmd_dev,flag_speed,flag_rom\n");
}

TEST(Log, SixDecimalPlaces) {
  Sample s;
  s.t = 0.125;
  s.q_deg[0] = 1.0 / 3.0;
  const std::string csv = samples_to_csv({s});
  EXPECT_NE(csv.find("\n0.125000,0.333333,"), std::string::npos);
}

TEST(Log, GapReportsRow) {
  try {
    samples_from_csv(hand_csv({0.0, 0.05, 0.06}));
    FAIL() << "expected LogError";
  } catch (const LogError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(Log, NonMonotoneReportsRow) {
  try {
    samples_from_csv(hand_csv({0.0, 0.01, 0.02, 0.02}));
    FAIL() << "expected LogError";
  } catch (const LogError& e) {
    EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos) << e.what();
  }
}

TEST(Log, MissingColumnNamed) {
  std::string csv = hand_csv({0.0, 0.01});
  csv.replace(csv.find("tilt_corr_deg"), 13, "tilt_corr_xxx");
  try {
    samples_from_csv(csv);
    FAIL() << "expected LogError";
  } catch (const LogError& e) {
    EXPECT_NE(std::string(e.what()).find("tilt_corr_deg"), std::string::npos) << e.what();
  }
}

TEST(Log, ColumnOrderIsFlexibleOnRead) {
  // Swap two columns in header and data; values follow their names.
  std::string csv = "grasp,t_s";
  for (std::size_t i = 1; i < kLogColumns.size(); ++i) {
    if (kLogColumns[i] != "grasp") csv += "," + std::string(kLogColumns[i]);
  }
  csv += "\n1,0.5";
  for (std::size_t i = 2; i < kLogColumns.size(); ++i) csv += ",0";
  csv += "\n";
  const auto s = samples_from_csv(csv);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].t, 0.5);
  EXPECT_EQ(s[0].grasp, 1.0);
}

TEST(Log, SchemaVersionMismatch) {
  TempDir dir("schema");
  const auto rec = run_trial(config_for(TaskKind::drinking, Condition::wrist_locked, 1));
  write_log(rec, dir.path() / "t");
  std::string side = exowrist::testing::slurp(dir.path() / "t.json");
  side.replace(side.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
  std::ofstream(dir.path() / "t.json") << side;
  try {
    read_log(dir.path() / "t.csv");
    FAIL() << "expected LogError";
  } catch (const LogError& e) {
    EXPECT_NE(std::string(e.what()).find("schema_version"), std::string::npos) << e.what();
  }
}

TEST(Log, ExternalRecordingIngests) {
  // Hand-written log from a real session, scored by the experimenter.
  TempDir dir("external");
  std::vector<double> times;
  for (int k = 0; k < 50; ++k) times.push_back(k * 0.01);
  std::ofstream(dir.path() / "session.csv") << hand_csv(times, 0.05);
  std::ofstream(dir.path() / "session.json") << R"({
    "schema_version": 1,
    "config": {
      "participant_id": "ALS01", "condition": "wrist_enabled", "seed": 0,
      "task": {"kind": "scratch_level", "waypoints": [
        {"phase": "approach", "position_m": [0.4, 0.0, 0.8]},
        {"phase": "release", "position_m": [0.4, -0.05, 0.83]}]}
    },
    "events": [{"name": "grasp", "t": 0.1}, {"name": "placement", "t": 0.4}, {"name": "release", "t": 0.4}],
    "outcome": {"spill": "n/a", "leveling": "human_assisted", "tct_s": 0.4}
  })";
  const auto rec = read_log(dir.path() / "session.csv");
  EXPECT_EQ(rec.outcome.leveling, LevelingOutcome::human_assisted);
  EXPECT_EQ(rec.config.participant_id, "ALS01");
  EXPECT_EQ(rec.samples.size(), 50u);

  // Without an outcome block the record is classified from its samples.
  std::ofstream(dir.path() / "session.json") << R"({
    "schema_version": 1,
    "config": {"participant_id": "ALS01", "condition": "wrist_enabled", "seed": 0,
      "task": {"kind": "drinking", "fill_level": 0.8, "waypoints": [
        {"phase": "approach", "position_m": [0.4, 0.0, 0.8]},
        {"phase": "release", "position_m": [0.4, -0.05, 0.83]}]}},
    "events": [{"name": "grasp", "t": 0.1}, {"name": "release", "t": 0.4}]
  })";
  const auto classified = read_log(dir.path() / "session.json");
  EXPECT_EQ(classified.outcome.spill, SpillOutcome::no_spill);
  EXPECT_NEAR(classified.outcome.tct, 0.35, 1e-12);
}

TEST(Log, ReleaseBeforeGraspRejected) {
  TempDir dir("order");
  std::ofstream(dir.path() / "x.csv") << hand_csv({0.0, 0.01});
  std::ofstream(dir.path() / "x.json") << R"({"schema_version": 1,
    "config": {"participant_id": "A", "condition": "wrist_locked", "seed": 0,
      "task": {"kind": "drinking", "waypoints": []}},
    "events": [{"name": "release", "t": 0.0}]})";
  EXPECT_THROW(read_log(dir.path() / "x.csv"), LogError);
}
