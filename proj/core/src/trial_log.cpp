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

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exowrist/metrics.hpp"
#include "exowrist/trials.hpp"

namespace exowrist::trials {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path base_of(const fs::path& p) {
  if (p.extension() == ".csv" || p.extension() == ".json") return fs::path(p).replace_extension();
  return p;
}

fs::path with_ext(const fs::path& base, const char* ext) { return fs::path(base.string() + ext); }

void append_number(std::string& out, double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", v + 0.0);
  out.append(buf, static_cast<std::size_t>(n));
}

json vec_json(const arm::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

arm::Vec3 vec_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw LogError("sidecar: field '" + field + "' must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const json& need(const json& j, const std::string& field, const std::string& path) {
  if (!j.is_object() || !j.contains(field)) throw LogError("sidecar: missing field '" + path + field + "'");
  return j.at(field);
}

json config_json(const TrialConfig& c) {
  json wps = json::array();
  for (const auto& w : c.task.waypoints) {
    wps.push_back({{"phase", std::string(task::to_string(w.phase))}, {"position_m", vec_json(w.position)}});
  }
  return {{"participant_id", c.participant_id},
          {"condition", std::string(task::to_string(c.condition))},
          {"seed", c.seed},
          {"trial_index", c.trial_index},
          {"repetition", c.repetition},
          {"operator_speed", c.operator_speed},
          {"rom_override", {{"adduction_min_deg", c.rom.adduction_min}, {"abduction_max_deg", c.rom.abduction_max}}},
          {"task",
           {{"kind", std::string(task::to_string(c.task.kind))},
            {"fill_level", c.task.fill_level},
            {"stick_length_m", c.task.stick_length},
            {"stick_base_offset_m", c.task.stick_base_offset},
            {"marker_m", vec_json(c.task.marker)},
            {"waypoints", wps}}}};
}

TrialConfig config_from(const json& j) {
  TrialConfig c;
  c.participant_id = need(j, "participant_id", "config.").get<std::string>();
  c.condition = task::condition_from_string(need(j, "condition", "config.").get<std::string>());
  c.seed = need(j, "seed", "config.").get<std::uint64_t>();
  c.trial_index = j.value("trial_index", 0);
  c.repetition = j.value("repetition", 0);
  c.operator_speed = j.value("operator_speed", 1.0);
  if (j.contains("rom_override")) {
    const json& r = j["rom_override"];
    c.rom.adduction_min = need(r, "adduction_min_deg", "config.rom_override.").get<double>();
    c.rom.abduction_max = need(r, "abduction_max_deg", "config.rom_override.").get<double>();
  }
  const json& t = need(j, "task", "config.");
  c.task.kind = task::task_kind_from_string(need(t, "kind", "config.task.").get<std::string>());
  c.task.fill_level = t.value("fill_level", 0.5);
  c.task.stick_length = t.value("stick_length_m", 0.48);
  c.task.stick_base_offset = t.value("stick_base_offset_m", 0.08);
  if (t.contains("marker_m")) c.task.marker = vec_from(t["marker_m"], "config.task.marker_m");
  const json& wps = need(t, "waypoints", "config.task.");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const std::string at = "config.task.waypoints[" + std::to_string(i) + "].";
    task::Waypoint w;
    w.phase = task::phase_from_string(need(wps[i], "phase", at).get<std::string>());
    w.position = vec_from(need(wps[i], "position_m", at), at + "position_m");
    c.task.waypoints.push_back(w);
  }
  return c;
}

double parse_field(std::string_view s, std::size_t row, std::string_view column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw LogError("row " + std::to_string(row) + ": column '" + std::string(column) + "' is not a number: '" +
                   std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LogError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw LogError("cannot write " + p.string());
  out << text;
  if (!out) throw LogError("write failed for " + p.string());
}

}  // namespace

const std::array<std::string_view, 24> kLogColumns = {
    "t_s",        "q_sh_fe_deg", "q_sh_ie_deg", "q_el_fe_deg", "q_fa_ps_deg",    "q_wr_dev_deg",
    "grasp",      "hand_x_m",    "hand_y_m",    "hand_z_m",    "quat_w",         "quat_x",
    "quat_y",     "quat_z",      "tilt_total_deg", "tilt_corr_deg", "theta_ref_deg", "cmd_vx",
    "cmd_vy",     "cmd_vz",      "cmd_ps",      "cmd_dev",     "flag_speed",     "flag_rom"};

std::string samples_to_csv(const std::vector<Sample>& samples) {
  std::string out;
  out.reserve(samples.size() * 200 + 256);
  for (std::size_t i = 0; i < kLogColumns.size(); ++i) {
    if (i) out += ',';
    out += kLogColumns[i];
  }
  out += '\n';
  for (const Sample& s : samples) {
    append_number(out, s.t);
    for (double v : s.q_deg) out += ',', append_number(out, v);
    out += ',', append_number(out, s.grasp);
    for (double v : s.hand) out += ',', append_number(out, v);
    for (double v : s.quat) out += ',', append_number(out, v);
    out += ',', append_number(out, s.tilt_total_deg);
    out += ',', append_number(out, s.tilt_corr_deg);
    out += ',', append_number(out, s.theta_ref_deg);
    for (double v : s.cmd) out += ',', append_number(out, v);
    out += ',';
    out += s.flag_speed ? '1' : '0';
    out += ',';
    out += s.flag_rom ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<Sample> samples_from_csv(std::string_view text, double max_gap) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = pos + 1;
  }
  if (lines.empty()) throw LogError("log is empty; expected a header row");

  const auto header = split(lines[0]);
  std::array<std::size_t, kLogColumns.size()> index{};
  for (std::size_t c = 0; c < kLogColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), kLogColumns[c]);
    if (it == header.end()) throw LogError("missing required column '" + std::string(kLogColumns[c]) + "'");
    index[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<Sample> out;
  out.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto f = split(lines[r]);
    if (f.size() != header.size()) {
      throw LogError("row " + std::to_string(r) + ": expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(f.size()));
    }
    double v[kLogColumns.size()];
    for (std::size_t c = 0; c < kLogColumns.size(); ++c) v[c] = parse_field(f[index[c]], r, kLogColumns[c]);

    Sample s;
    s.t = v[0];
    for (int i = 0; i < 5; ++i) s.q_deg[i] = v[1 + i];
    s.grasp = v[6];
    for (int i = 0; i < 3; ++i) s.hand[i] = v[7 + i];
    for (int i = 0; i < 4; ++i) s.quat[i] = v[10 + i];
    s.tilt_total_deg = v[14];
    s.tilt_corr_deg = v[15];
    s.theta_ref_deg = v[16];
    for (int i = 0; i < 5; ++i) s.cmd[i] = v[17 + i];
    s.flag_speed = v[22] != 0.0 ? 1 : 0;
    s.flag_rom = v[23] != 0.0 ? 1 : 0;

    if (!out.empty()) {
      const double dt = s.t - out.back().t;
      if (!(dt > 0.0)) throw LogError("row " + std::to_string(r) + ": timestamp does not increase");
      if (dt > max_gap) {
        throw LogError("row " + std::to_string(r) + ": gap of " + std::to_string(dt) + " s before this sample");
      }
    }
    out.push_back(s);
  }
  return out;
}

void write_log(const TrialRecord& rec, const fs::path& base_in) {
  const fs::path base = base_of(base_in);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());

  json events = json::array();
  for (const auto& e : rec.events) events.push_back({{"name", e.name}, {"t", e.t}});
  json sidecar = {{"schema_version", kSchemaVersion},
                  {"config", config_json(rec.config)},
                  {"events", events},
                  {"outcome",
                   {{"spill", std::string(to_string(rec.outcome.spill))},
                    {"leveling", std::string(to_string(rec.outcome.leveling))},
                    {"tct_s", rec.outcome.tct},
                    {"timed_out", rec.outcome.timed_out}}}};

  write_file(with_ext(base, ".csv"), samples_to_csv(rec.samples));
  write_file(with_ext(base, ".json"), sidecar.dump(1) + "\n");
}

TrialRecord read_log(const fs::path& path) {
  const fs::path base = base_of(path);
  TrialRecord rec;
  json side;
  try {
    side = json::parse(read_file(with_ext(base, ".json")));
  } catch (const json::parse_error& e) {
    throw LogError(with_ext(base, ".json").string() + ": malformed json: " + e.what());
  }

  try {
    const json& version = need(side, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
      throw LogError("sidecar: schema_version " + version.dump() + " unsupported (expected " +
                     std::to_string(kSchemaVersion) + ")");
    }
    rec.config = config_from(need(side, "config", ""));
    const json& events = need(side, "events", "");
    if (!events.is_array()) throw LogError("sidecar: field 'events' must be an array");
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::string at = "events[" + std::to_string(i) + "].";
      Event e{need(events[i], "name", at).get<std::string>(), need(events[i], "t", at).get<double>()};
      if (e.name != "grasp" && e.name != "release" && e.name != "spill_onset" && e.name != "placement") {
        throw LogError("sidecar: field '" + at + "name' has unknown event '" + e.name + "'");
      }
      rec.events.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw LogError("sidecar: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw LogError("sidecar: " + std::string(e.what()));
  }

  rec.samples = samples_from_csv(read_file(with_ext(base, ".csv")));

  // Releases must follow their grasp.
  int held = 0;
  for (const auto& e : rec.events) {
    if (e.name == "grasp") ++held;
    if (e.name == "release" && --held < 0) throw LogError("sidecar: release at t=" + std::to_string(e.t) + " precedes any grasp");
  }

  if (side.contains("outcome")) {
    try {
      const json& o = side["outcome"];
      rec.outcome.spill = spill_outcome_from_string(o.value("spill", std::string("n/a")));
      rec.outcome.leveling = leveling_outcome_from_string(o.value("leveling", std::string("n/a")));
      rec.outcome.tct = need(o, "tct_s", "outcome.").get<double>();
      rec.outcome.timed_out = o.value("timed_out", false);
    } catch (const json::exception& e) {
      throw LogError("sidecar: outcome: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
      throw LogError("sidecar: outcome: " + std::string(e.what()));
    }
  } else {
    try {
      if (rec.config.task.kind == TaskKind::drinking) {
        rec.outcome.spill = classify_spill(rec);
      } else {
        rec.outcome.leveling = classify_leveling(rec);
      }
      const auto tct = metrics::completion_time(rec);
      rec.outcome.tct = tct.seconds;
      rec.outcome.timed_out = tct.timed_out;
    } catch (const Error& e) {
      throw LogError(std::string("cannot classify: ") + e.what());
    }
  }
  return rec;
}

}  // namespace exowrist::trials
