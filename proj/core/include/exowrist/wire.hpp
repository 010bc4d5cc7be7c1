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

// Newline-delimited JSON protocol between the simulator and an operator
// client. One object per line:
//
//   {"kind": "<hello|command|state|event|error>", "seq": <uint>, "payload": {...}}
//
// Readers ignore unknown fields. seq strictly increases per direction.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "exowrist/error.hpp"

namespace exowrist::wire {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 8571;

class ProtocolError : public Error {
 public:
  using Error::Error;
};

struct Hello {
  int version = kProtocolVersion;
  std::string role;       // "operator", "observer" or "simulator"
  int decimation = 1;     // broadcast every Nth state
  bool operator==(const Hello&) const = default;
};

struct Buttons {
  bool grasp = false;
  bool release = false;
  bool operator==(const Buttons&) const = default;
};

struct Command {
  std::array<double, 5> axes{};  // vx, vy, vz, ps, dev
  Buttons buttons;
  double t = 0.0;
  bool operator==(const Command&) const = default;
};

struct StateFlags {
  bool speed = false;
  bool rom = false;
  bool estop = false;
  bool stale = false;
  bool operator==(const StateFlags&) const = default;
};

struct State {
  double t = 0.0;
  std::array<double, 5> q_deg{};
  double grasp = 0.0;
  std::array<double, 3> hand_pos_m{};
  double tilt_deg = 0.0;
  double tilt_corr_deg = 0.0;
  double theta_ref_deg = 0.0;
  std::string condition;
  StateFlags flags;
  bool operator==(const State&) const = default;
};

struct Event {
  std::string name;  // grasp, release, spill_onset, placement, estop, resume
  double t = 0.0;
  bool operator==(const Event&) const = default;
};

struct ErrorMsg {
  std::string code;
  std::string text;
  bool operator==(const ErrorMsg&) const = default;
};

using Payload = std::variant<Hello, Command, State, Event, ErrorMsg>;

struct Message {
  std::uint64_t seq = 0;
  Payload payload;

  std::string_view kind() const;
  bool operator==(const Message&) const = default;
};

// Serialized line including the trailing newline.
std::string encode(const Message& m);

// Accepts a line with or without its newline. Throws ProtocolError.
Message decode(std::string_view line);

// Tracks seq for one direction of one connection.
class SeqChecker {
 public:
  // Throws ProtocolError when seq does not increase.
  void check(const Message& m);
  std::optional<std::uint64_t> last() const { return last_; }

 private:
  std::optional<std::uint64_t> last_;
};

// Splits a byte stream into lines; keeps the incomplete tail buffered.
class LineBuffer {
 public:
  explicit LineBuffer(std::size_t max_line = 64 * 1024) : max_line_(max_line) {}

  void append(std::string_view bytes);
  // Returns the next complete line without its newline. Throws ProtocolError
  // once the pending tail exceeds max_line.
  std::optional<std::string> next_line();

 private:
  std::string buffer_;
  std::size_t max_line_;
};

}  // namespace exowrist::wire
