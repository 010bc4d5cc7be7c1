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

#include "exowrist/wire.hpp"

#include <nlohmann/json.hpp>

namespace exowrist::wire {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ProtocolError(what); }

const json& field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) fail(std::string("missing field '") + name + "'");
  return *it;
}

template <typename T>
T get(const json& obj, const char* name) {
  const json& v = field(obj, name);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* name, T fallback) {
  if (!obj.contains(name)) return fallback;
  return get<T>(obj, name);
}

template <std::size_t N>
std::array<double, N> get_array(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_array() || v.size() != N) {
    fail(std::string("field '") + name + "' must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) fail(std::string("field '") + name + "' must hold numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

json to_json(const Hello& h) { return {{"version", h.version}, {"role", h.role}, {"decimation", h.decimation}}; }

json to_json(const Command& c) {
  return {{"axes", c.axes},
          {"buttons", {{"grasp", c.buttons.grasp}, {"release", c.buttons.release}}},
          {"t", c.t}};
}

json to_json(const State& s) {
  return {{"t", s.t},
          {"q_deg", s.q_deg},
          {"grasp", s.grasp},
          {"hand_pos_m", s.hand_pos_m},
          {"tilt_deg", s.tilt_deg},
          {"tilt_corr_deg", s.tilt_corr_deg},
          {"theta_ref_deg", s.theta_ref_deg},
          {"condition", s.condition},
          {"flags",
           {{"speed", s.flags.speed}, {"rom", s.flags.rom}, {"estop", s.flags.estop}, {"stale", s.flags.stale}}}};
}

json to_json(const Event& e) { return {{"name", e.name}, {"t", e.t}}; }

json to_json(const ErrorMsg& e) { return {{"code", e.code}, {"text", e.text}}; }

Payload parse_payload(std::string_view kind, const json& p) {
  if (!p.is_object()) fail("payload must be an object");
  if (kind == "hello") {
    Hello h;
    h.version = get<int>(p, "version");
    h.role = get<std::string>(p, "role");
    h.decimation = get_or<int>(p, "decimation", 1);
    if (h.decimation < 1) fail("decimation must be >= 1");
    return h;
  }
  if (kind == "command") {
    Command c;
    c.axes = get_array<5>(p, "axes");
    if (p.contains("buttons")) {
      const json& b = p["buttons"];
      if (!b.is_object()) fail("field 'buttons' must be an object");
      c.buttons.grasp = get_or<bool>(b, "grasp", false);
      c.buttons.release = get_or<bool>(b, "release", false);
    }
    c.t = get<double>(p, "t");
    return c;
  }
  if (kind == "state") {
    State s;
    s.t = get<double>(p, "t");
    s.q_deg = get_array<5>(p, "q_deg");
    s.grasp = get<double>(p, "grasp");
    s.hand_pos_m = get_array<3>(p, "hand_pos_m");
    s.tilt_deg = get<double>(p, "tilt_deg");
    s.tilt_corr_deg = get_or<double>(p, "tilt_corr_deg", 0.0);
    s.theta_ref_deg = get<double>(p, "theta_ref_deg");
    s.condition = get<std::string>(p, "condition");
    if (p.contains("flags")) {
      const json& f = p["flags"];
      if (!f.is_object()) fail("field 'flags' must be an object");
      s.flags.speed = get_or<bool>(f, "speed", false);
      s.flags.rom = get_or<bool>(f, "rom", false);
      s.flags.estop = get_or<bool>(f, "estop", false);
      s.flags.stale = get_or<bool>(f, "stale", false);
    }
    return s;
  }
  if (kind == "event") return Event{get<std::string>(p, "name"), get<double>(p, "t")};
  if (kind == "error") return ErrorMsg{get<std::string>(p, "code"), get<std::string>(p, "text")};
  fail("unknown kind '" + std::string(kind) + "'");
}

}  // namespace

std::string_view Message::kind() const {
  static constexpr std::string_view kinds[] = {"hello", "command", "state", "event", "error"};
  return kinds[payload.index()];
}

std::string encode(const Message& m) {
  json j;
  j["kind"] = std::string(m.kind());
  j["seq"] = m.seq;
  j["payload"] = std::visit([](const auto& p) { return to_json(p); }, m.payload);
  return j.dump() + "\n";
}

Message decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed json: ") + e.what());
  }
  if (!j.is_object()) fail("message must be a json object");
  const json& seq = field(j, "seq");
  if (!seq.is_number_unsigned() && !(seq.is_number_integer() && seq.get<std::int64_t>() >= 0)) {
    fail("field 'seq' must be a non-negative integer");
  }
  Message m;
  m.seq = seq.get<std::uint64_t>();
  m.payload = parse_payload(get<std::string>(j, "kind"), field(j, "payload"));
  return m;
}

void SeqChecker::check(const Message& m) {
  if (last_ && m.seq <= *last_) {
    throw ProtocolError("non-monotone seq " + std::to_string(m.seq) + " after " + std::to_string(*last_));
  }
  last_ = m.seq;
}

void LineBuffer::append(std::string_view bytes) { buffer_.append(bytes); }

std::optional<std::string> LineBuffer::next_line() {
  const auto pos = buffer_.find('\n');
  if (pos == std::string::npos) {
    if (buffer_.size() > max_line_) {
      buffer_.clear();
      throw ProtocolError("line exceeds " + std::to_string(max_line_) + " bytes");
    }
    return std::nullopt;
  }
  std::string line = buffer_.substr(0, pos);
  buffer_.erase(0, pos + 1);
  return line;
}

}  // namespace exowrist::wire
