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

#include "exowrist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

namespace exowrist::metrics {

using trials::TaskKind;
using trials::TrialRecord;

RomMetrics rom_metrics(const DeviationSeries& s) {
  if (s.values.empty()) throw std::invalid_argument("rom_metrics: empty series");
  if (!s.sample_times.empty() && s.sample_times.size() != s.values.size()) {
    throw std::invalid_argument("rom_metrics: values and sample times differ in length");
  }
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  return {*hi - *lo, *hi, *lo};
}

DeviationSeries deviation_series(const TrialRecord& rec) {
  DeviationSeries s;
  s.values.reserve(rec.samples.size());
  s.sample_times.reserve(rec.samples.size());
  for (const auto& x : rec.samples) {
    s.values.push_back(x.q_deg[4]);
    s.sample_times.push_back(x.t);
  }
  return s;
}

double event_deviation(const TrialRecord& rec, EventKind event) {
  if (event == EventKind::release && rec.config.task.kind == TaskKind::drinking) {
    throw InapplicableError("event_deviation: release is only sampled for the scratch task");
  }
  const char* name = event == EventKind::grasp ? "grasp" : "release";
  const auto t = rec.event_time(name);
  if (!t) throw InapplicableError(std::string("event_deviation: no ") + name + " event");
  if (rec.samples.empty()) throw InapplicableError("event_deviation: record has no samples");

  const trials::Sample* best = &rec.samples.front();
  for (const auto& s : rec.samples) {
    // Ties go to the earlier sample.
    if (std::abs(s.t - *t) < std::abs(best->t - *t)) best = &s;
  }
  return best->q_deg[4];
}

CompletionTime completion_time(const TrialRecord& rec, double timeout) {
  std::optional<double> start;
  for (const auto& s : rec.samples) {
    if (std::any_of(s.cmd.begin(), s.cmd.end(), [](double c) { return c != 0.0; })) {
      start = s.t;
      break;
    }
  }
  std::optional<double> end;
  if (rec.config.task.kind == TaskKind::drinking) {
    end = rec.event_time("release");
  } else {
    end = rec.event_time("placement");
    if (!end) end = rec.event_time("release");
  }
  if (!end) return {timeout, true};
  if (!start) throw InapplicableError("completion_time: no operator command in record");
  return {*end - *start, false};
}

RomMetrics participant_aggregate(const std::vector<RomMetrics>& per_trial) {
  if (per_trial.empty()) throw std::invalid_argument("participant_aggregate: no trials");
  RomMetrics out = per_trial.front();
  for (const auto& m : per_trial) {
    out.rom = std::max(out.rom, m.rom);
    out.abduction_peak = std::max(out.abduction_peak, m.abduction_peak);
    out.adduction_peak = std::min(out.adduction_peak, m.adduction_peak);
  }
  return out;
}

std::vector<MetricsRow> metrics_table(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<std::string, trials::Condition, TaskKind>;
  std::map<Key, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.config.participant_id, r.config.condition, r.config.task.kind}].push_back(&r);
  }

  std::vector<MetricsRow> rows;
  for (const auto& [key, recs] : groups) {
    MetricsRow row;
    std::tie(row.participant, row.condition, row.task) = key;
    row.trials = static_cast<int>(recs.size());

    std::vector<RomMetrics> roms;
    double grasp_sum = 0.0, release_sum = 0.0, tct_sum = 0.0;
    int grasp_n = 0, release_n = 0, tct_n = 0;
    for (const TrialRecord* r : recs) {
      if (!r->samples.empty()) roms.push_back(rom_metrics(deviation_series(*r)));
      if (r->event_time("grasp")) {
        grasp_sum += event_deviation(*r, EventKind::grasp);
        ++grasp_n;
      }
      if (row.task == TaskKind::scratch_level && r->event_time("release")) {
        release_sum += event_deviation(*r, EventKind::release);
        ++release_n;
      }
      if (r->outcome.leveling != trials::LevelingOutcome::grasp_failure) {
        tct_sum += r->outcome.tct;
        ++tct_n;
      }
    }
    if (!roms.empty()) row.rom = participant_aggregate(roms);
    if (grasp_n > 0) row.grasp_dev_deg = grasp_sum / grasp_n;
    if (release_n > 0) row.release_dev_deg = release_sum / release_n;
    if (tct_n > 0) row.tct_s = tct_sum / tct_n;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "participant,condition,task,rom_deg,abd_peak_deg,add_peak_deg,grasp_dev_deg,release_dev_deg,tct_s\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v + 0.0);
    return std::string(buf);
  };
  auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    out += r.participant + "," + std::string(task::to_string(r.condition)) + "," +
           std::string(task::to_string(r.task)) + "," + num(r.rom.rom) + "," + num(r.rom.abduction_peak) + "," +
           num(r.rom.adduction_peak) + "," + opt(r.grasp_dev_deg) + "," + opt(r.release_dev_deg) + "," +
           opt(r.tct_s) + "\n";
  }
  return out;
}

}  // namespace exowrist::metrics
