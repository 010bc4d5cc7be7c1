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

#include "exowrist/trials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "exowrist/metrics.hpp"
#include "exowrist/simulator.hpp"
#include "exowrist/units.hpp"

namespace exowrist::trials {
namespace {

constexpr std::string_view kSpillNames[] = {"spill", "no_spill", "n/a"};
constexpr std::string_view kLevelingNames[] = {"exo_only_success", "human_assisted", "not_leveled",
                                               "grasp_failure", "n/a"};

template <typename E, std::size_t N>
E parse(std::string_view s, const std::string_view (&names)[N], const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

// First sample index of a run of tilt above threshold lasting min_duration,
// searched between grasp and release.
std::optional<std::size_t> spill_onset_index(const TrialRecord& rec, const SpillModel& model) {
  const auto grasp = rec.event_time("grasp");
  if (!grasp) return std::nullopt;
  const double release = rec.event_time("release").value_or(std::numeric_limits<double>::infinity());
  const double threshold = model.threshold_deg(rec.config.task.fill_level);

  std::optional<std::size_t> run_start;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const Sample& s = rec.samples[i];
    const bool loaded = s.t >= *grasp && s.t <= release;
    if (!loaded || !(s.tilt_total_deg > threshold)) {
      run_start.reset();
      continue;
    }
    if (!run_start) run_start = i;
    const double period = i > *run_start ? (s.t - rec.samples[*run_start].t) / static_cast<double>(i - *run_start)
                                          : kControlPeriod;
    const double held = s.t - rec.samples[*run_start].t + period;
    if (held >= model.min_duration - 1e-9) return run_start;
  }
  return std::nullopt;
}

const Sample* sample_at(const TrialRecord& rec, double t) {
  const Sample* best = nullptr;
  double gap = std::numeric_limits<double>::infinity();
  for (const Sample& s : rec.samples) {
    const double d = std::abs(s.t - t);
    if (d < gap) {
      gap = d;
      best = &s;
    }
  }
  return best;
}

}  // namespace

arm::WristRom RomDeg::to_rad() const { return {deg2rad(adduction_min), deg2rad(abduction_max)}; }

std::string_view to_string(SpillOutcome o) { return kSpillNames[static_cast<int>(o)]; }
std::string_view to_string(LevelingOutcome o) { return kLevelingNames[static_cast<int>(o)]; }
SpillOutcome spill_outcome_from_string(std::string_view s) { return parse<SpillOutcome>(s, kSpillNames, "spill outcome"); }
LevelingOutcome leveling_outcome_from_string(std::string_view s) {
  return parse<LevelingOutcome>(s, kLevelingNames, "leveling outcome");
}

std::optional<double> TrialRecord::event_time(std::string_view name) const {
  for (const Event& e : events) {
    if (e.name == name) return e.t;
  }
  return std::nullopt;
}

double SpillModel::threshold_deg(double fill_level) const {
  const double f = std::clamp(fill_level, 0.2, 0.8);
  return threshold_empty_deg + (threshold_full_deg - threshold_empty_deg) * (f - 0.2) / 0.6;
}

double GripModel::load(double tilt_total_rad) const {
  return base_load * (1.0 + tilt_gain * std::abs(std::sin(tilt_total_rad)));
}

arm::ChainGeometry default_chain_geometry() {
  arm::ChainGeometry g;
  g.base.position = arm::Vec3(0.10, 0.05, 1.10);
  return g;
}

SimParams SimParams::defaults() { return SimParams{}; }

actuation::ClockSpring SimParams::spring(const arm::WristRom& rom) const {
  actuation::ClockSpring s;
  if (spring_stiffness_nmm_per_deg) s.stiffness_nmm_per_deg = *spring_stiffness_nmm_per_deg;
  s.pretension = spring_pretension ? *spring_pretension : actuation::default_pretension(plant, s, rom);
  return s;
}

void check_reachable(const SimParams& p, const task::TaskSpec& t) {
  arm::JointConfig q;
  q.set_proximal(p.start_posture);
  for (std::size_t i = 0; i < t.waypoints.size(); ++i) {
    const arm::Vec3& target = t.waypoints[i].position;
    double err = 0.0;
    for (int it = 0; it < 300; ++it) {
      const arm::Vec3 e = target - arm::forward_kinematics(p.geometry, q).position;
      err = e.norm();
      if (err < 1e-6) break;
      const control::JointRates dq = control::resolved_rate(p.geometry, q, e, p.dls_lambda);
      arm::ProximalAngles a = q.proximal();
      for (std::size_t j = 0; j < a.size(); ++j) a[j] += dq[static_cast<Eigen::Index>(j)];
      q.set_proximal(a);
    }
    if (err > 1e-4) {
      std::ostringstream os;
      os << "waypoint " << i << " (" << task::to_string(t.waypoints[i].phase) << ") at (" << target.x() << ", "
         << target.y() << ", " << target.z() << ") is out of reach; residual " << err << " m";
      throw ConfigError(os.str());
    }
  }
}

TrialRecord run_trial(const TrialConfig& cfg, const SimParams& p) {
  cfg.task.validate();
  check_reachable(p, cfg.task);

  Rng policy_rng(derive_seed(cfg.seed, 1));
  teleop::PolicyParams pp = p.policy;
  pp.speed_scale = cfg.operator_speed;
  teleop::ScriptedPolicy policy(pp, cfg.task, cfg.condition, policy_rng);
  Simulator sim(p, cfg.condition, cfg.rom, cfg.task, derive_seed(cfg.seed, 2));

  TrialRecord rec;
  rec.config = cfg;
  const auto ticks = static_cast<std::int64_t>(std::llround(p.timeout / p.dt));
  rec.samples.reserve(static_cast<std::size_t>(ticks) + 1);
  bool done = false;
  for (std::int64_t k = 0; k < ticks && !done; ++k) {
    const teleop::OperatorCommand cmd = policy.step(sim.snapshot(), policy_rng);
    Simulator::Tick tick = sim.step(cmd);
    rec.samples.push_back(tick.sample);
    for (Event& e : tick.events) rec.events.push_back(std::move(e));
    done = tick.terminal;
  }
  if (!done) rec.samples.push_back(sim.observe());
  finalize_outcome(rec, p);
  return rec;
}

void finalize_outcome(TrialRecord& rec, const SimParams& p) {
  rec.events.erase(std::remove_if(rec.events.begin(), rec.events.end(),
                                  [](const Event& e) { return e.name == "spill_onset"; }),
                   rec.events.end());
  rec.outcome = Outcome{};
  if (rec.config.task.kind == TaskKind::drinking) {
    if (const auto onset = spill_onset_index(rec, p.spill)) {
      rec.events.push_back({"spill_onset", rec.samples[*onset].t});
      std::stable_sort(rec.events.begin(), rec.events.end(),
                       [](const Event& a, const Event& b) { return a.t < b.t; });
    }
    rec.outcome.spill = classify_spill(rec, p.spill);
  } else {
    rec.outcome.leveling = classify_leveling(rec, p.leveling);
  }
  const metrics::CompletionTime tct = metrics::completion_time(rec, p.timeout);
  rec.outcome.tct = tct.seconds;
  rec.outcome.timed_out = tct.timed_out;
}

SpillOutcome classify_spill(const TrialRecord& rec, const SpillModel& model) {
  if (rec.config.task.kind != TaskKind::drinking) throw InapplicableError("classify_spill: not a drinking trial");
  return spill_onset_index(rec, model) ? SpillOutcome::spill : SpillOutcome::no_spill;
}

LevelingOutcome classify_leveling(const TrialRecord& rec, const LevelingCriteria& crit) {
  if (rec.config.task.kind != TaskKind::scratch_level) {
    throw InapplicableError("classify_leveling: not a scratch trial");
  }
  const auto grasp = rec.event_time("grasp");
  const auto placement = rec.event_time("placement");
  const auto release = rec.event_time("release");
  if (!grasp) return LevelingOutcome::grasp_failure;
  if (release && (!placement || *release < *placement)) return LevelingOutcome::grasp_failure;
  if (!placement) return LevelingOutcome::not_leveled;

  const Sample* s = sample_at(rec, *placement);
  if (s == nullptr) return LevelingOutcome::not_leveled;
  const arm::Quat o(s->quat[0], s->quat[1], s->quat[2], s->quat[3]);
  const arm::Vec3 hand(s->hand[0], s->hand[1], s->hand[2]);
  const arm::Vec3 base = hand - o.normalized() * arm::Vec3(0.0, 0.0, rec.config.task.stick_base_offset);
  const double off_marker = (base - rec.config.task.marker).head<2>().norm();
  if (s->tilt_total_deg <= crit.tilt_tolerance_deg && off_marker <= crit.marker_radius) {
    return LevelingOutcome::exo_only_success;
  }
  return LevelingOutcome::not_leveled;
}

std::vector<Participant> default_participants() {
  return {
      {"P01", {-40.0, 30.0}, 1.00}, {"P02", {-38.0, 28.0}, 0.95}, {"P03", {-40.0, 30.0}, 0.90},
      {"P04", {-36.0, 26.0}, 1.00}, {"P05", {-39.0, 30.0}, 0.92}, {"P06", {-40.0, 29.0}, 0.97},
      {"P07", {-37.0, 27.0}, 0.90}, {"P08", {-40.0, 30.0}, 1.00},
  };
}

std::vector<TrialConfig> randomize_schedule(const std::vector<Participant>& participants, std::uint64_t seed,
                                            const ScheduleOptions& opt) {
  if (participants.empty()) throw std::invalid_argument("randomize_schedule: no participants");
  if (opt.trials_per_condition < 1) throw std::invalid_argument("randomize_schedule: trials_per_condition < 1");

  Rng order_rng(mix_seed(seed));
  std::vector<TrialConfig> out;
  int index = 0;
  for (const Participant& part : participants) {
    const bool enabled_first = order_rng.uniform() < 0.5;
    const Condition order[2] = {enabled_first ? Condition::wrist_enabled : Condition::wrist_locked,
                                enabled_first ? Condition::wrist_locked : Condition::wrist_enabled};
    for (Condition c : order) {
      for (TaskKind kind : opt.tasks) {
        for (int rep = 0; rep < opt.trials_per_condition; ++rep) {
          TrialConfig cfg;
          cfg.participant_id = part.id;
          cfg.condition = c;
          cfg.rom = part.rom;
          cfg.trial_index = index;
          cfg.repetition = rep;
          cfg.operator_speed = part.speed_scale;
          cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(index));
          Rng task_rng(derive_seed(cfg.seed, 0));
          cfg.task = task::build_task(kind, opt.scene, task_rng);
          out.push_back(std::move(cfg));
          ++index;
        }
      }
    }
  }
  return out;
}

}  // namespace exowrist::trials
