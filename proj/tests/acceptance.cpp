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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Criteria 2, 3, 4, 6, 8 and 10 share one 10-seed experiment whose
// logs are re-read from disk, so every check runs on what a user would get.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "exowrist/actuation.hpp"
#include "exowrist/arm_model.hpp"
#include "exowrist/control.hpp"
#include "exowrist/metrics.hpp"
#include "exowrist/stats.hpp"
#include "exowrist/units.hpp"
#include "exowrist_app/config.hpp"
#include "exowrist_app/experiment.hpp"
#include "exowrist_app/report.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace exowrist;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSuiteSeeds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Shared 10-seed experiment, run once on first use.
struct Suite {
  exowrist::testing::TempDir dir{"acceptance"};
  app::ExperimentConfig cfg;
  std::vector<app::SeedRun> runs;
  double seconds = 0.0;

  Suite() {
    cfg.output_dir = dir.path() / "suite";
    cfg.seeds.clear();
    for (std::uint64_t s = 1; s <= kSuiteSeeds; ++s) cfg.seeds.push_back(s);
    const auto t0 = Clock::now();
    runs = app::run_experiment(cfg);
    seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  }

  // Visits every logged trial of every seed, one seed in memory at a time.
  void for_each_record(const std::function<void(std::uint64_t, const trials::TrialRecord&)>& f) const {
    for (const auto& run : runs) {
      const auto logs = app::load_logs(run.dir / "logs");
      if (!logs.failures.empty()) throw Error("unreadable log " + logs.failures.front().file);
      for (const auto& r : logs.records) f(run.seed, r);
    }
  }
};

Suite& suite() {
  static Suite s;
  return s;
}

const app::Comparison& comparison(const app::Report& r, const std::string& name) {
  for (const auto& c : r.comparisons) {
    if (c.name == name) return c;
  }
  throw Error("report has no comparison " + name);
}

int count(const app::Report& r, const char* task, const char* cond, const char* label) {
  return r.outcomes.at(task).at(cond).at(label);
}

Outcome capstan() {
  const double loss = 1.0 - actuation::TendonPath{}.efficiency();
  actuation::TendonPath exact;
  exact.friction_mu = std::log(10.0 / 9.0);
  exact.wrap_angle = 1.0;
  const double out = actuation::capstan_transmit(10.0, exact);
  return {loss >= 0.08 && loss <= 0.12 && std::abs(out - 9.0) <= 1e-9,
          "default loss " + fmt("%.2f%%", 100.0 * loss) + "; 10 N in, " + fmt("%.12f", out) + " N out"};
}

Outcome spill_surrogate() {
  Suite& s = suite();
  bool ok = s.seconds < 60.0;
  std::ostringstream os;
  os << "enabled/locked spills per seed:";
  for (const auto& run : s.runs) {
    const int en = count(run.report, "drinking", "wrist_enabled", "spill");
    const int lo = count(run.report, "drinking", "wrist_locked", "spill");
    const int n_en = en + count(run.report, "drinking", "wrist_enabled", "no_spill");
    const int n_lo = lo + count(run.report, "drinking", "wrist_locked", "no_spill");
    ok = ok && n_en == 32 && n_lo == 32 && en <= 1 && lo >= 8 && en < lo;
    os << " " << en << "/" << lo;
  }
  os << " (of 32); suite " << fmt("%.1f", s.seconds) << " s";
  return {ok, os.str()};
}

Outcome closed_loop_leveling() {
  double worst = 0.0;
  int trials = 0;
  suite().for_each_record([&](std::uint64_t, const trials::TrialRecord& r) {
    if (r.config.task.kind != trials::TaskKind::drinking || r.config.condition != trials::Condition::wrist_enabled) {
      return;
    }
    ++trials;
    for (const auto& smp : r.samples) {
      if (smp.t >= 1.0) worst = std::max(worst, std::abs(smp.tilt_corr_deg));
    }
  });
  return {trials == 32 * static_cast<int>(kSuiteSeeds) && worst <= 3.0,
          std::to_string(trials) + " enabled drinking trials, max |tilt_correctable| after 1 s " + fmt("%.3f", worst) +
              " deg"};
}

Outcome metrics_exactness() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-45.0, 35.0);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(1 + rng() % 5000);
    for (double& x : v) x = u(rng);
    if (!(metrics::rom_metrics({v, {}}) == exowrist::testing::naive_rom(v))) ++mismatches;
  }
  int locked = 0, nonzero = 0;
  suite().for_each_record([&](std::uint64_t, const trials::TrialRecord& r) {
    if (r.config.condition != trials::Condition::wrist_locked) return;
    ++locked;
    if (!(metrics::rom_metrics(metrics::deviation_series(r)) == metrics::RomMetrics{0, 0, 0})) ++nonzero;
  });
  return {mismatches == 0 && nonzero == 0 && locked > 0,
          "100 random series, " + std::to_string(mismatches) + " oracle mismatches; " + std::to_string(locked) +
              " locked trials, " + std::to_string(nonzero) + " with ROM != 0"};
}

Outcome statistics_validation() {
  const auto chi = stats::chi_square_independence({{{18, 14}, {1, 31}}});
  const bool a = std::abs(chi.statistic - 21.633) <= 0.01 && chi.df == 1.0;

  const auto t = stats::paired_t({{1, 2, 3}, {0, 0, 0}});
  const bool b = std::abs(t.statistic - 3.4641) <= 1e-3 && std::abs(t.p_two_tailed - 0.0742) <= 1e-3;

  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> small(-5, 5);
  std::normal_distribution<double> n(0.2, 1.0);
  int wil_fixtures = 0, wil_bad = 0;
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> d(1 + rng() % 12);
    for (double& x : d) x = rep % 2 ? small(rng) : n(rng);
    if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; })) continue;
    stats::PairedSample s{d, std::vector<double>(d.size(), 0.0)};
    if (d.size() < 2) s = {{d[0], 0.0}, {0.0, 0.0}};
    ++wil_fixtures;
    if (stats::wilcoxon_signed_rank(s).p_two_tailed != exowrist::testing::brute_wilcoxon_p(s.differences())) ++wil_bad;
  }
  const bool c = wil_fixtures > 0 && wil_bad == 0;

  double dw = 0.0, dp = 0.0;
  int sw = 0;
  const nlohmann::json refs = exowrist::testing::reference_values();
  for (const auto& f : refs.at("shapiro_wilk")) {
    const auto r = stats::shapiro_wilk(f["x"].get<std::vector<double>>());
    dw = std::max(dw, std::abs(r.statistic - f["w"].get<double>()));
    dp = std::max(dp, std::abs(r.p_two_tailed - f["p"].get<double>()));
    ++sw;
  }
  const bool d = sw == 20 && dw < 1e-4 && dp < 1e-3;

  std::ostringstream os;
  os << "(a) chi2 " << fmt("%.4f", chi.statistic) << " df " << *chi.df << (a ? " ok" : " BAD") << "; (b) t "
     << fmt("%.4f", t.statistic) << " p " << fmt("%.4f", t.p_two_tailed) << (b ? " ok" : " BAD") << "; (c) "
     << wil_fixtures - wil_bad << "/" << wil_fixtures << " Wilcoxon fixtures exact; (d) " << sw
     << " Shapiro-Wilk fixtures, max dW " << fmt("%.1e", dw) << " max dp " << fmt("%.1e", dp);
  return {a && b && c && d, os.str()};
}

Outcome safety_invariants() {
  // Positions are logged to 1e-6 m, so a 10 ms difference carries up to
  // sqrt(3) * 1e-6 / 0.01 m/s of rounding.
  const double hand_tol = std::sqrt(3.0) * 1e-6 / 0.01;
  const double wrist_tol = 2e-6 * kPi / 180.0 / 0.01;
  double max_hand = 0.0, max_wrist = 0.0;
  int trials = 0, rom_violations = 0;
  suite().for_each_record([&](std::uint64_t, const trials::TrialRecord& r) {
    ++trials;
    const auto& rom = r.config.rom;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& s = r.samples[i];
      if (s.q_deg[4] < rom.adduction_min - 1e-6 || s.q_deg[4] > rom.abduction_max + 1e-6) ++rom_violations;
      if (i == 0) continue;
      const auto& p = r.samples[i - 1];
      const double dt = s.t - p.t;
      const double dx = std::hypot(s.hand[0] - p.hand[0], s.hand[1] - p.hand[1], s.hand[2] - p.hand[2]);
      max_hand = std::max(max_hand, dx / dt);
      max_wrist = std::max(max_wrist, deg2rad(std::abs(s.q_deg[4] - p.q_deg[4])) / dt);
    }
  });
  return {trials > 0 && max_hand <= 0.04 + hand_tol && max_wrist <= 0.2 + wrist_tol && rom_violations == 0,
          std::to_string(trials) + " logged trials: max hand speed " + fmt("%.6f", max_hand) + " m/s, max wrist speed " +
              fmt("%.6f", max_wrist) + " rad/s, " + std::to_string(rom_violations) + " samples outside user ROM"};
}

Outcome pid_step_response() {
  const trials::SimParams p = trials::SimParams::defaults();
  const arm::WristRom rom = arm::device_wrist_rom();
  const actuation::ClockSpring spring = p.spring(rom);
  const arm::Pose level;  // forearm horizontal: largest gravity load
  bool ok = true;
  std::ostringstream os;
  for (const double step_deg : {10.0, -10.0}) {
    const double target = deg2rad(step_deg);
    actuation::PlantState plant;
    control::PidState pid;
    double peak = 0.0, settle = 0.0, tail_speed = 0.0;
    const int steps = 500;  // 5 s
    for (int k = 0; k < steps; ++k) {
      const auto u = control::pid_step(p.pid, pid, target, plant.theta, p.dt);
      pid = u.state;
      actuation::StepInputs in;
      in.dt = p.dt;
      in.moment_arm = p.drive.moment_arm;
      in.motor_tension = actuation::drive_tension(p.drive, p.plant, spring, p.tendon, plant, u.command, level, p.dt);
      plant = actuation::step_plant(p.plant, spring, p.tendon, plant, in, level, rom);
      const double t = (k + 1) * p.dt;
      peak = std::max(peak, plant.theta / target);
      if (std::abs(rad2deg(plant.theta - target)) > 0.5) settle = t;
      if (t > 4.0) tail_speed = std::max(tail_speed, std::abs(plant.theta_dot));
    }
    const double overshoot = std::max(0.0, peak - 1.0);
    const bool pass = settle <= 2.0 && overshoot < 0.2 && tail_speed < 1e-3;
    ok = ok && pass;
    os << (step_deg > 0 ? "+" : "") << step_deg << " deg: settled " << fmt("%.2f", settle) << " s, overshoot "
       << fmt("%.1f%%", 100.0 * overshoot) << ", final-second speed " << fmt("%.1e", tail_speed) << " rad/s; ";
  }
  std::string d = os.str();
  d.resize(d.size() - 2);
  return {ok, d};
}

Outcome determinism() {
  Suite& s = suite();
  app::ExperimentConfig cfg = s.cfg;
  cfg.seeds = {1};
  cfg.threads = 3;
  cfg.output_dir = s.dir.path() / "parallel";
  app::run_experiment(cfg);

  auto tree = [](const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = exowrist::testing::slurp(e.path());
    }
    return out;
  };
  const auto serial = tree(s.runs.front().dir);
  const auto parallel = tree(cfg.output_dir / "seed_1");
  const bool same = serial == parallel;
  const bool reanalysis =
      app::report_json(app::analyze_dir(cfg.output_dir / "seed_1" / "logs")) == serial.at("report.json");
  return {same && reanalysis && serial.size() > 6,
          std::to_string(serial.size()) + " files for seed 1, " + (same ? "identical" : "DIFFERENT") +
              " between 1 and 3 worker threads; re-analysis " + (reanalysis ? "matches" : "DIFFERS") +
              " report.json"};
}

Outcome kinematics() {
  const auto g = trials::default_chain_geometry();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    arm::JointConfig q;
    q.set_proximal({u(rng), u(rng), u(rng), u(rng)});
    q.wrist_dev = 0.4 * u(rng);
    const arm::Jacobian j = arm::positional_jacobian(g, q);
    for (int c = 0; c < 4; ++c) {
      arm::JointConfig qp = q, qm = q;
      auto a = q.proximal(), b = q.proximal();
      a[c] += 1e-6;
      b[c] -= 1e-6;
      qp.set_proximal(a);
      qm.set_proximal(b);
      const arm::Vec3 fd =
          (arm::forward_kinematics(g, qp).position - arm::forward_kinematics(g, qm).position) / 2e-6;
      worst_fd = std::max(worst_fd, (fd - j.col(c)).norm());
    }
  }

  // Along the logged drinking paths of seed 1 (wrist enabled).
  const arm::WristRom wide{-kPi / 2.0, kPi / 2.0};
  double worst_loop = 0.0;
  int points = 0;
  const auto logs = app::load_logs(suite().runs.front().dir / "logs");
  for (const auto& r : logs.records) {
    if (r.config.task.kind != trials::TaskKind::drinking || r.config.condition != trials::Condition::wrist_enabled) {
      continue;
    }
    for (const auto& s : r.samples) {
      const arm::ProximalAngles qp{deg2rad(s.q_deg[0]), deg2rad(s.q_deg[1]), deg2rad(s.q_deg[2]), deg2rad(s.q_deg[3])};
      const auto sol = arm::required_wrist_deviation(g, qp, 0.0, wide);
      if (sol.degenerate || sol.clamped) continue;
      arm::JointConfig q;
      q.set_proximal(qp);
      q.wrist_dev = sol.deviation;
      worst_loop = std::max(worst_loop, std::abs(arm::cup_tilt(arm::forward_kinematics(g, q)).correctable));
      ++points;
    }
  }
  return {worst_fd < 1e-6 && worst_loop < 1e-6 && points > 1000,
          "Jacobian vs central differences at 100 poses, max error " + fmt("%.1e", worst_fd) + " m/rad; loop closure at " +
              std::to_string(points) + " path samples, max residual " + fmt("%.1e", worst_loop) + " rad"};
}

Outcome tct_neutrality() {
  bool ok = true;
  std::ostringstream os;
  for (const char* name : {"tct_drinking", "tct_scratch_level"}) {
    double lo = 1.0;
    std::string tests;
    for (const auto& run : suite().runs) {
      const auto& c = comparison(run.report, name);
      if (!c.result) throw Error(std::string(name) + " not computed: " + c.note);
      lo = std::min(lo, c.result->p_two_tailed);
      ok = ok && c.result->p_two_tailed > 0.05;
      if (tests.find(c.result->test_name) == std::string::npos) tests += (tests.empty() ? "" : "/") + c.result->test_name;
    }
    os << name << " min p " << fmt("%.3f", lo) << " (" << tests << "); ";
  }
  std::string d = os.str();
  d.resize(d.size() - 2);
  return {ok, d + " over " + std::to_string(kSuiteSeeds) + " seeds"};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"capstan losses", capstan},
      {"spill surrogate", spill_surrogate},
      {"closed-loop leveling", closed_loop_leveling},
      {"metrics exactness", metrics_exactness},
      {"statistics validation", statistics_validation},
      {"safety invariants", safety_invariants},
      {"controller step response", pid_step_response},
      {"determinism", determinism},
      {"kinematics", kinematics},
      {"TCT neutrality", tct_neutrality},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s %2d %-24s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %d criteria passed\n", id - failed, id);
  return failed == 0 ? 0 : 1;
}
