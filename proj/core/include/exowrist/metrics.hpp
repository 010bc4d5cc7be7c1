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

// Wrist deviation range metrics, event-time sampling, completion time and
// the participant-level table.

#include <optional>
#include <string>
#include <vector>

#include "exowrist/trials.hpp"

namespace exowrist::metrics {

struct DeviationSeries {
  std::vector<double> values;        // deg
  std::vector<double> sample_times;  // s, same length as values (or empty)
};

struct RomMetrics {
  double rom = 0.0;             // deg, max - min
  double abduction_peak = 0.0;  // deg, max
  double adduction_peak = 0.0;  // deg, min

  bool operator==(const RomMetrics&) const = default;
};

// Throws std::invalid_argument for an empty or misaligned series.
RomMetrics rom_metrics(const DeviationSeries& s);

DeviationSeries deviation_series(const trials::TrialRecord& rec);

enum class EventKind { grasp, release };

// Deviation at the sample nearest the event. Throws InapplicableError when
// the event is missing or release is asked of a drinking trial.
double event_deviation(const trials::TrialRecord& rec, EventKind event);

struct CompletionTime {
  double seconds = 0.0;
  bool timed_out = false;
};

// Terminal event minus the first nonzero command. Terminal is release for
// drinking and placement for the scratch task (release when the stick was
// dropped). Without a terminal event the timeout is reported with the flag
// set. Throws InapplicableError when no command was ever issued.
CompletionTime completion_time(const trials::TrialRecord& rec, double timeout = trials::kTimeout);

// Max rom, max abduction peak, min adduction peak. Throws
// std::invalid_argument for an empty list.
RomMetrics participant_aggregate(const std::vector<RomMetrics>& per_trial);

struct MetricsRow {
  std::string participant;
  trials::Condition condition = trials::Condition::wrist_enabled;
  trials::TaskKind task = trials::TaskKind::drinking;
  RomMetrics rom;
  std::optional<double> grasp_dev_deg;    // mean over trials
  std::optional<double> release_dev_deg;  // mean over trials, scratch only
  // Mean over trials not aborted by a dropped object (grasp_failure);
  // timed-out trials count at the timeout. Empty when every trial dropped.
  std::optional<double> tct_s;
  int trials = 0;
};

// One row per (participant, condition, task), sorted in that order.
std::vector<MetricsRow> metrics_table(const std::vector<trials::TrialRecord>& records);

std::string metrics_csv(const std::vector<MetricsRow>& rows);

}  // namespace exowrist::metrics
