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

// Log directory analysis: outcome counts, the participant metrics table and
// the condition comparisons, rendered as JSON, text and plot-ready CSVs.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exowrist/metrics.hpp"
#include "exowrist/stats.hpp"
#include "exowrist/trials.hpp"

namespace exowrist::app {

struct LogFailure {
  std::string file;  // relative to the analyzed directory
  std::string error;
};

struct LoadedLogs {
  std::vector<trials::TrialRecord> records;  // sorted by file name
  std::vector<LogFailure> failures;
};

// Reads every <base>.csv/<base>.json pair below dir. Files that fail to
// ingest, and halves of a pair, are reported instead of aborting.
LoadedLogs load_logs(const std::filesystem::path& dir);

struct Comparison {
  std::string name;
  int n = 0;  // pairs, or trials for contingency tables
  std::optional<stats::StatsResult> result;
  std::string note;  // why result is missing
};

// task -> condition -> outcome label -> count
using OutcomeCounts = std::map<std::string, std::map<std::string, std::map<std::string, int>>>;

// Per participant and condition, pooled over tasks.
struct ParticipantRom {
  std::string participant;
  trials::Condition condition = trials::Condition::wrist_enabled;
  metrics::RomMetrics rom;
};

struct Report {
  int n_trials = 0;
  int n_timeouts = 0;
  std::vector<LogFailure> failures;
  OutcomeCounts outcomes;
  std::vector<metrics::MetricsRow> metrics;
  std::vector<ParticipantRom> participant_rom;
  std::vector<Comparison> comparisons;
};

Report analyze_records(const std::vector<trials::TrialRecord>& records, std::vector<LogFailure> failures = {});
Report analyze_dir(const std::filesystem::path& dir);

std::string report_json(const Report& r);
std::string report_text(const Report& r);
std::string stats_csv(const Report& r);
std::string fig4_csv(const Report& r);
std::string fig5_csv(const Report& r);
// Spill rates, leveling outcomes and the completion-time tests.
std::string headline(const Report& r);

// report.json, report.txt, metrics.csv, stats.csv, fig4_outcomes.csv,
// fig5_distributions.csv
void write_report(const Report& r, const std::filesystem::path& out_dir);

}  // namespace exowrist::app
