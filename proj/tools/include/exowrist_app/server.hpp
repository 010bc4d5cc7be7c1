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

// Live teleoperation server and log replay over the wire protocol.
//
// One io thread owns every socket; the simulation tick runs on its own
// thread at 100 Hz and talks to the io side through two bounded queues.
// Outbound state drops the oldest entry when a client falls behind;
// inbound commands are never dropped, reading pauses instead. A client
// whose first byte is 'G' is treated as a WebSocket upgrade, anything
// else as raw newline-delimited TCP.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "exowrist/trials.hpp"
#include "exowrist/wire.hpp"

namespace exowrist::app {

struct NetOptions {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = wire::kDefaultPort;  // 0 picks a free port
  std::size_t state_queue = 256;            // per client
  std::size_t command_queue = 1024;
  bool verbose = false;  // connection log on stderr
};

struct ServeOptions {
  NetOptions net;
  trials::SimParams sim = trials::SimParams::defaults();
  trials::Condition condition = trials::Condition::wrist_enabled;
  trials::Participant participant = trials::default_participants().front();
  trials::TaskKind task = trials::TaskKind::drinking;
  std::uint64_t seed = 1;
  std::filesystem::path log_base;  // empty: no session log
  double staleness = 0.2;          // s
};

struct TickStats {
  std::int64_t ticks = 0;
  double p99_lateness_ms = 0.0;
  double max_lateness_ms = 0.0;
};

class Hub;

class Server {
 public:
  explicit Server(ServeOptions opt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Throws Error when the address cannot be bound.
  void start();
  std::uint16_t port() const;
  // Joins both threads and writes the session log when configured.
  void stop();
  TickStats tick_stats() const;

 private:
  void tick_loop();

  ServeOptions opt_;
  std::unique_ptr<Hub> hub_;
  std::thread tick_thread_;
  std::atomic<bool> running_{false};
  mutable std::mutex stats_mu_;
  std::vector<double> lateness_ms_;
  trials::TrialRecord session_;
};

struct ReplayOptions {
  NetOptions net;
  std::filesystem::path log;
  double rate = 1.0;  // playback speed multiplier
};

// Streams a logged trial as state/event messages once a client has said
// hello, then sends a replay_end event.
class Replayer {
 public:
  explicit Replayer(ReplayOptions opt);  // reads the log; throws LogError
  ~Replayer();
  Replayer(const Replayer&) = delete;
  Replayer& operator=(const Replayer&) = delete;

  void start();
  std::uint16_t port() const;
  void wait();  // until the last message is queued
  void stop();

 private:
  void run();

  ReplayOptions opt_;
  trials::TrialRecord rec_;
  std::unique_ptr<Hub> hub_;
  std::thread thread_;
  std::atomic<bool> running_{false};
};

}  // namespace exowrist::app
