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

#include "exowrist_app/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace exowrist::app {
namespace {

class Parser {
 public:
  void fail(const std::string& field, const std::string& what) { errors_.push_back(field + ": " + what); }

  void check_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
    if (!n.IsMap()) {
      fail(where, "expected a mapping");
      return;
    }
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }

  template <typename T>
  bool get(const YAML::Node& n, const std::string& field, T& out) {
    try {
      out = n.as<T>();
      return true;
    } catch (const YAML::Exception&) {
      fail(field, "wrong type");
      return false;
    }
  }

  // Positive finite number.
  void positive(const YAML::Node& parent, const char* key, const std::string& where, double& out) {
    if (!parent[key]) return;
    double v = 0.0;
    const std::string field = where + "." + key;
    if (!get(parent[key], field, v)) return;
    if (!std::isfinite(v) || v <= 0.0) {
      fail(field, "must be > 0");
      return;
    }
    out = v;
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

void parse_participants(Parser& p, const YAML::Node& n, ExperimentConfig& cfg) {
  if (!n.IsSequence() || n.size() == 0) {
    p.fail("participants", "expected a non-empty list");
    return;
  }
  cfg.participants.clear();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string where = "participants[" + std::to_string(i) + "]";
    const YAML::Node e = n[i];
    p.check_keys(e, where, {"id", "rom_deg", "speed"});
    if (!e.IsMap()) continue;
    trials::Participant part;
    if (!e["id"]) {
      p.fail(where + ".id", "required");
    } else if (p.get(e["id"], where + ".id", part.id)) {
      if (part.id.empty()) p.fail(where + ".id", "must not be empty");
      if (!seen.insert(part.id).second) p.fail(where + ".id", "duplicate id '" + part.id + "'");
    }
    if (const auto r = e["rom_deg"]) {
      std::vector<double> v;
      if (p.get(r, where + ".rom_deg", v)) {
        if (v.size() != 2) {
          p.fail(where + ".rom_deg", "expected [adduction_min, abduction_max]");
        } else if (!(v[0] < 0.0 && v[1] > 0.0 && v[0] >= -90.0 && v[1] <= 90.0)) {
          p.fail(where + ".rom_deg", "need -90 <= adduction_min < 0 < abduction_max <= 90");
        } else {
          part.rom = {v[0], v[1]};
        }
      }
    }
    if (const auto s = e["speed"]) {
      double v = 1.0;
      if (p.get(s, where + ".speed", v)) {
        if (!(v > 0.0 && v <= 1.0)) p.fail(where + ".speed", "must be in (0, 1]");
        part.speed_scale = v;
      }
    }
    cfg.participants.push_back(part);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config: YAML syntax error: " + std::string(e.what()));
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");

  Parser p;
  ExperimentConfig cfg;
  p.check_keys(root, "", {"schema_version", "output_dir", "seeds", "trials_per_condition", "tasks", "conditions",
                          "threads", "participants", "plant", "spring", "tendon", "policy"});

  if (!root["schema_version"]) {
    p.fail("schema_version", "required");
  } else {
    int v = 0;
    if (p.get(root["schema_version"], "schema_version", v) && v != kConfigSchemaVersion) {
      p.fail("schema_version", "unsupported version " + std::to_string(v) + " (expected " +
                                   std::to_string(kConfigSchemaVersion) + ")");
    }
  }
  if (const auto n = root["output_dir"]) {
    std::string s;
    if (p.get(n, "output_dir", s)) cfg.output_dir = s;
  }
  if (const auto n = root["seeds"]) {
    std::vector<std::uint64_t> v;
    if (p.get(n, "seeds", v)) {
      if (v.empty()) p.fail("seeds", "must not be empty");
      std::set<std::uint64_t> uniq(v.begin(), v.end());
      if (uniq.size() != v.size()) p.fail("seeds", "duplicate seed");
      cfg.seeds = v;
    }
  }
  if (const auto n = root["trials_per_condition"]) {
    int v = 0;
    if (p.get(n, "trials_per_condition", v)) {
      if (v < 1 || v > 1000) p.fail("trials_per_condition", "must be in [1, 1000]");
      cfg.trials_per_condition = v;
    }
  }
  if (const auto n = root["threads"]) {
    int v = 0;
    if (p.get(n, "threads", v)) {
      if (v < 0) p.fail("threads", "must be >= 0");
      cfg.threads = v;
    }
  }
  if (const auto n = root["tasks"]) {
    std::vector<std::string> v;
    if (p.get(n, "tasks", v)) {
      cfg.tasks.clear();
      if (v.empty()) p.fail("tasks", "must not be empty");
      for (const auto& s : v) {
        try {
          cfg.tasks.push_back(task::task_kind_from_string(s));
        } catch (const std::invalid_argument&) {
          p.fail("tasks", "unknown task '" + s + "'");
        }
      }
    }
  }
  if (const auto n = root["conditions"]) {
    std::vector<std::string> v;
    if (p.get(n, "conditions", v)) {
      cfg.conditions.clear();
      if (v.empty()) p.fail("conditions", "must not be empty");
      for (const auto& s : v) {
        try {
          cfg.conditions.push_back(task::condition_from_string(s));
        } catch (const std::invalid_argument&) {
          p.fail("conditions", "unknown condition '" + s + "'");
        }
      }
    }
  }
  if (const auto n = root["participants"]) parse_participants(p, n, cfg);

  auto& sim = cfg.sim;
  if (const auto n = root["plant"]) {
    p.check_keys(n, "plant", {"inertia", "damping", "hand_cup_mass", "com_distance"});
    if (n.IsMap()) {
      p.positive(n, "inertia", "plant", sim.plant.inertia);
      p.positive(n, "damping", "plant", sim.plant.damping);
      p.positive(n, "hand_cup_mass", "plant", sim.plant.hand_cup_mass);
      p.positive(n, "com_distance", "plant", sim.plant.com_distance);
    }
  }
  if (const auto n = root["spring"]) {
    p.check_keys(n, "spring", {"stiffness_nmm_per_deg", "pretension_nm"});
    if (n.IsMap()) {
      double k = 0.0, pre = 0.0;
      p.positive(n, "stiffness_nmm_per_deg", "spring", k);
      p.positive(n, "pretension_nm", "spring", pre);
      if (k > 0.0) sim.spring_stiffness_nmm_per_deg = k;
      if (pre > 0.0) sim.spring_pretension = pre;
    }
  }
  if (const auto n = root["tendon"]) {
    p.check_keys(n, "tendon", {"friction", "wrap_deg"});
    if (n.IsMap()) {
      p.positive(n, "friction", "tendon", sim.tendon.friction_mu);
      double wrap = 0.0;
      p.positive(n, "wrap_deg", "tendon", wrap);
      if (wrap > 0.0) sim.tendon.wrap_angle = wrap * std::numbers::pi / 180.0;
    }
  }
  if (const auto n = root["policy"]) {
    p.check_keys(n, "policy", {"noise_sd"});
    if (n.IsMap() && n["noise_sd"]) {
      double v = 0.0;
      if (p.get(n["noise_sd"], "policy.noise_sd", v)) {
        if (!(v >= 0.0 && v <= 1.0)) p.fail("policy.noise_sd", "must be in [0, 1]");
        sim.policy.noise_sd = v;
      }
    }
  }

  if (!p.errors().empty()) {
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& e : p.errors()) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace exowrist::app
