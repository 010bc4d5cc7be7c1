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

#include "exowrist_app/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace exowrist::app {
namespace fs = std::filesystem;
using trials::Condition;
using trials::TaskKind;
using trials::TrialRecord;

namespace {

const std::set<std::string> kReportFiles{"report.json",  "report.txt",         "metrics.csv",
                                         "stats.csv",    "fig4_outcomes.csv", "fig5_distributions.csv"};

const std::vector<std::string> kSpillLabels{"spill", "no_spill"};
const std::vector<std::string> kLevelingLabels{"exo_only_success", "human_assisted", "not_leveled", "grasp_failure"};

std::string num(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v + 0.0);
  return buf;
}

std::string cond(Condition c) { return std::string(task::to_string(c)); }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

using PerParticipant = std::map<std::string, double>;

Comparison paired(const std::string& name, const PerParticipant& enabled, const PerParticipant& locked) {
  Comparison c;
  c.name = name;
  stats::PairedSample s;
  for (const auto& [pid, x] : enabled) {
    const auto it = locked.find(pid);
    if (it == locked.end()) continue;
    s.x.push_back(x);
    s.y.push_back(it->second);
  }
  c.n = static_cast<int>(s.x.size());
  try {
    c.result = stats::select_and_run(s);
  } catch (const std::exception& e) {
    c.note = e.what();
  }
  return c;
}

Comparison contingency(const std::string& name, const std::map<std::string, std::map<std::string, int>>* by_cond,
                       const std::vector<std::string>& labels, bool yates) {
  Comparison c;
  c.name = name;
  if (!by_cond || !by_cond->count("wrist_locked") || !by_cond->count("wrist_enabled")) {
    c.note = "needs trials in both conditions";
    return c;
  }
  // Rows locked, enabled; categories nobody reached are dropped.
  stats::ContingencyTable t;
  t.counts.resize(2);
  for (const auto& label : labels) {
    const long long lo = by_cond->at("wrist_locked").count(label) ? by_cond->at("wrist_locked").at(label) : 0;
    const long long en = by_cond->at("wrist_enabled").count(label) ? by_cond->at("wrist_enabled").at(label) : 0;
    if (lo + en == 0) continue;
    t.counts[0].push_back(lo);
    t.counts[1].push_back(en);
    c.n += static_cast<int>(lo + en);
  }
  try {
    c.result = stats::chi_square_independence(t, yates);
  } catch (const std::exception& e) {
    c.note = e.what();
  }
  return c;
}

}  // namespace

LoadedLogs load_logs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::map<std::string, std::pair<bool, bool>> stems;  // relative stem -> (csv, json)
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (kReportFiles.count(p.filename().string())) continue;
    const auto ext = p.extension().string();
    if (ext != ".csv" && ext != ".json") continue;
    const std::string stem = fs::relative(p, dir).replace_extension().generic_string();
    auto& have = stems[stem];
    (ext == ".csv" ? have.first : have.second) = true;
  }

  LoadedLogs out;
  for (const auto& [stem, have] : stems) {
    if (!have.first || !have.second) {
      out.failures.push_back({stem + (have.first ? ".csv" : ".json"),
                              std::string("missing ") + (have.first ? ".json sidecar" : ".csv samples")});
      continue;
    }
    try {
      out.records.push_back(trials::read_log(dir / stem));
    } catch (const std::exception& e) {
      out.failures.push_back({stem, e.what()});
    }
  }
  return out;
}

Report analyze_records(const std::vector<TrialRecord>& records, std::vector<LogFailure> failures) {
  Report r;
  r.failures = std::move(failures);
  r.n_trials = static_cast<int>(records.size());

  for (const auto& rec : records) {
    if (rec.outcome.timed_out) ++r.n_timeouts;
    const bool drinking = rec.config.task.kind == TaskKind::drinking;
    auto& bucket = r.outcomes[std::string(task::to_string(rec.config.task.kind))][cond(rec.config.condition)];
    if (bucket.empty()) {
      for (const auto& l : drinking ? kSpillLabels : kLevelingLabels) bucket[l] = 0;
    }
    const std::string label(drinking ? trials::to_string(rec.outcome.spill) : trials::to_string(rec.outcome.leveling));
    ++bucket[label];
  }

  r.metrics = metrics::metrics_table(records);

  std::map<std::pair<std::string, Condition>, std::vector<metrics::RomMetrics>> roms;
  for (const auto& rec : records) {
    if (rec.samples.empty()) continue;
    roms[{rec.config.participant_id, rec.config.condition}].push_back(
        metrics::rom_metrics(metrics::deviation_series(rec)));
  }
  for (const auto& [key, list] : roms) {
    r.participant_rom.push_back({key.first, key.second, metrics::participant_aggregate(list)});
  }

  const auto find_task = [&](const char* t) -> const std::map<std::string, std::map<std::string, int>>* {
    const auto it = r.outcomes.find(t);
    return it == r.outcomes.end() ? nullptr : &it->second;
  };
  r.comparisons.push_back(contingency("spill_rate", find_task("drinking"), kSpillLabels, false));
  r.comparisons.push_back(contingency("spill_rate_yates", find_task("drinking"), kSpillLabels, true));
  r.comparisons.push_back(contingency("leveling_outcome", find_task("scratch_level"), kLevelingLabels, false));

  for (const TaskKind kind : {TaskKind::drinking, TaskKind::scratch_level}) {
    PerParticipant tct[2], grasp[2], release[2];
    bool any = false;
    for (const auto& row : r.metrics) {
      if (row.task != kind) continue;
      any = true;
      const int c = row.condition == Condition::wrist_enabled ? 0 : 1;
      if (row.tct_s) tct[c][row.participant] = *row.tct_s;
      if (row.grasp_dev_deg) grasp[c][row.participant] = *row.grasp_dev_deg;
      if (row.release_dev_deg) release[c][row.participant] = *row.release_dev_deg;
    }
    if (!any) continue;
    const std::string suffix(task::to_string(kind));
    r.comparisons.push_back(paired("tct_" + suffix, tct[0], tct[1]));
    r.comparisons.push_back(paired("grasp_dev_" + suffix, grasp[0], grasp[1]));
    if (kind == TaskKind::scratch_level) r.comparisons.push_back(paired("release_dev_" + suffix, release[0], release[1]));
  }

  PerParticipant rom[2], abd[2], add[2];
  for (const auto& pr : r.participant_rom) {
    const int c = pr.condition == Condition::wrist_enabled ? 0 : 1;
    rom[c][pr.participant] = pr.rom.rom;
    abd[c][pr.participant] = pr.rom.abduction_peak;
    add[c][pr.participant] = pr.rom.adduction_peak;
  }
  if (!r.participant_rom.empty()) {
    r.comparisons.push_back(paired("rom", rom[0], rom[1]));
    r.comparisons.push_back(paired("abduction_peak", abd[0], abd[1]));
    r.comparisons.push_back(paired("adduction_peak", add[0], add[1]));
  }
  return r;
}

Report analyze_dir(const fs::path& dir) {
  LoadedLogs logs = load_logs(dir);
  return analyze_records(logs.records, std::move(logs.failures));
}

std::string report_json(const Report& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["n_trials"] = r.n_trials;
  j["n_timeouts"] = r.n_timeouts;

  ordered_json outcomes = ordered_json::object();
  for (const auto& [task, by_cond] : r.outcomes) {
    for (const auto& [c, counts] : by_cond) {
      for (const auto& [label, n] : counts) outcomes[task][c][label] = n;
    }
  }
  j["outcomes"] = outcomes;

  ordered_json comps = ordered_json::array();
  for (const auto& c : r.comparisons) {
    ordered_json e;
    e["name"] = c.name;
    e["n"] = c.n;
    if (c.result) {
      e["test"] = c.result->test_name;
      e["statistic"] = c.result->statistic;
      e["df"] = c.result->df ? ordered_json(*c.result->df) : ordered_json(nullptr);
      e["p"] = c.result->p_two_tailed;
      e["effect_size"] = c.result->effect_size ? ordered_json(*c.result->effect_size) : ordered_json(nullptr);
      e["normality_p"] = c.result->normality_p ? ordered_json(*c.result->normality_p) : ordered_json(nullptr);
    } else {
      e["test"] = nullptr;
      e["note"] = c.note;
    }
    comps.push_back(e);
  }
  j["comparisons"] = comps;

  ordered_json rows = ordered_json::array();
  for (const auto& m : r.metrics) {
    ordered_json e;
    e["participant"] = m.participant;
    e["condition"] = cond(m.condition);
    e["task"] = task::to_string(m.task);
    e["trials"] = m.trials;
    e["rom_deg"] = m.rom.rom;
    e["abd_peak_deg"] = m.rom.abduction_peak;
    e["add_peak_deg"] = m.rom.adduction_peak;
    e["grasp_dev_deg"] = m.grasp_dev_deg ? ordered_json(*m.grasp_dev_deg) : ordered_json(nullptr);
    e["release_dev_deg"] = m.release_dev_deg ? ordered_json(*m.release_dev_deg) : ordered_json(nullptr);
    e["tct_s"] = m.tct_s ? ordered_json(*m.tct_s) : ordered_json(nullptr);
    rows.push_back(e);
  }
  j["metrics"] = rows;

  ordered_json errs = ordered_json::array();
  for (const auto& f : r.failures) errs.push_back({{"file", f.file}, {"error", f.error}});
  j["errors"] = errs;
  return j.dump(2) + "\n";
}

std::string stats_csv(const Report& r) {
  std::string out = "comparison,test,n,statistic,df,p,effect_size,normality_p,note\n";
  for (const auto& c : r.comparisons) {
    out += c.name + ",";
    if (c.result) {
      const auto& s = *c.result;
      out += s.test_name + "," + std::to_string(c.n) + "," + num(s.statistic) + "," + (s.df ? num(*s.df, "%g") : "") +
             "," + num(s.p_two_tailed, "%.6g") + "," + (s.effect_size ? num(*s.effect_size) : "") + "," +
             (s.normality_p ? num(*s.normality_p, "%.6g") : "") + ",\n";
    } else {
      std::string note = c.note;
      for (char& ch : note) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out += "," + std::to_string(c.n) + ",,,,,," + note + "\n";
    }
  }
  return out;
}

std::string fig4_csv(const Report& r) {
  std::string out = "task,condition,outcome,count,fraction\n";
  for (const auto& [task, by_cond] : r.outcomes) {
    for (const auto& [c, counts] : by_cond) {
      int total = 0;
      for (const auto& kv : counts) total += kv.second;
      for (const auto& [label, n] : counts) {
        out += task + "," + c + "," + label + "," + std::to_string(n) + "," +
               num(total > 0 ? static_cast<double>(n) / total : 0.0) + "\n";
      }
    }
  }
  return out;
}

std::string fig5_csv(const Report& r) {
  std::string out = "participant,condition,task,metric,value\n";
  for (const auto& pr : r.participant_rom) {
    const std::string head = pr.participant + "," + cond(pr.condition) + ",all,";
    out += head + "rom_deg," + num(pr.rom.rom) + "\n";
    out += head + "abd_peak_deg," + num(pr.rom.abduction_peak) + "\n";
    out += head + "add_peak_deg," + num(pr.rom.adduction_peak) + "\n";
  }
  for (const auto& m : r.metrics) {
    const std::string head = m.participant + "," + cond(m.condition) + "," + std::string(task::to_string(m.task)) + ",";
    if (m.grasp_dev_deg) out += head + "grasp_dev_deg," + num(*m.grasp_dev_deg) + "\n";
    if (m.release_dev_deg) out += head + "release_dev_deg," + num(*m.release_dev_deg) + "\n";
    if (m.tct_s) out += head + "tct_s," + num(*m.tct_s) + "\n";
  }
  return out;
}

std::string headline(const Report& r) {
  std::ostringstream os;
  os << "trials: " << r.n_trials << " (timeouts " << r.n_timeouts << ", unreadable logs " << r.failures.size()
     << ")\n";
  for (const auto& [task, by_cond] : r.outcomes) {
    for (const auto& [c, counts] : by_cond) {
      int total = 0;
      for (const auto& kv : counts) total += kv.second;
      os << task << " / " << c << ":";
      for (const auto& [label, n] : counts) {
        os << " " << label << " " << n << "/" << total;
        if (task == "drinking" && label == "spill" && total > 0) os << " (" << num(100.0 * n / total, "%.0f") << "%)";
      }
      os << "\n";
    }
  }
  for (const auto& c : r.comparisons) {
    if (c.name.rfind("tct_", 0) != 0 && c.name.rfind("spill", 0) != 0 && c.name != "leveling_outcome") continue;
    os << c.name << ": ";
    if (c.result) {
      os << c.result->test_name << " stat " << num(c.result->statistic, "%.4f");
      if (c.result->df) os << " df " << num(*c.result->df, "%g");
      os << " p " << num(c.result->p_two_tailed, "%.4g") << " (n " << c.n << ")\n";
    } else {
      os << "not computed: " << c.note << "\n";
    }
  }
  return os.str();
}

std::string report_text(const Report& r) {
  std::ostringstream os;
  os << headline(r) << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-26s %-18s %4s %12s %6s %12s %10s\n", "comparison", "test", "n", "statistic", "df",
                "p", "effect");
  os << line;
  for (const auto& c : r.comparisons) {
    if (!c.result) {
      std::snprintf(line, sizeof line, "%-26s %-18s %4d  (%s)\n", c.name.c_str(), "-", c.n, c.note.c_str());
    } else {
      const auto& s = *c.result;
      std::snprintf(line, sizeof line, "%-26s %-18s %4d %12.4f %6s %12.4g %10s\n", c.name.c_str(),
                    s.test_name.c_str(), c.n, s.statistic, s.df ? num(*s.df, "%g").c_str() : "-", s.p_two_tailed,
                    s.effect_size ? num(*s.effect_size, "%.3f").c_str() : "-");
    }
    os << line;
  }
  os << "\n";
  std::snprintf(line, sizeof line, "%-6s %-14s %-14s %8s %8s %8s %9s %9s %8s\n", "id", "condition", "task", "rom",
                "abd", "add", "grasp", "release", "tct_s");
  os << line;
  for (const auto& m : r.metrics) {
    std::snprintf(line, sizeof line, "%-6s %-14s %-14s %8.2f %8.2f %8.2f %9s %9s %8s\n", m.participant.c_str(),
                  cond(m.condition).c_str(), std::string(task::to_string(m.task)).c_str(), m.rom.rom,
                  m.rom.abduction_peak, m.rom.adduction_peak,
                  m.grasp_dev_deg ? num(*m.grasp_dev_deg, "%.2f").c_str() : "-",
                  m.release_dev_deg ? num(*m.release_dev_deg, "%.2f").c_str() : "-",
                  m.tct_s ? num(*m.tct_s, "%.2f").c_str() : "-");
    os << line;
  }
  if (!r.failures.empty()) {
    os << "\nerrors:\n";
    for (const auto& f : r.failures) os << "  " << f.file << ": " << f.error << "\n";
  }
  return os.str();
}

void write_report(const Report& r, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_file(out_dir / "report.json", report_json(r));
  write_file(out_dir / "report.txt", report_text(r));
  write_file(out_dir / "metrics.csv", metrics::metrics_csv(r.metrics));
  write_file(out_dir / "stats.csv", stats_csv(r));
  write_file(out_dir / "fig4_outcomes.csv", fig4_csv(r));
  write_file(out_dir / "fig5_distributions.csv", fig5_csv(r));
}

}  // namespace exowrist::app
