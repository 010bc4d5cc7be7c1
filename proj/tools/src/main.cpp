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

// exowrist command-line entry point.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include "exowrist_app/config.hpp"
#include "exowrist_app/experiment.hpp"
#include "exowrist_app/report.hpp"
#include "exowrist_app/server.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::uint16_t default_port() {
  if (const char* env = std::getenv("EXOWRIST_PORT")) {
    try {
      const int p = std::stoi(env);
      if (p > 0 && p < 65536) return static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
    }
    std::cerr << "exowrist: ignoring invalid EXOWRIST_PORT='" << env << "'\n";
  }
  return exowrist::wire::kDefaultPort;
}

void wait_for_interrupt(double duration_s) {
  const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(duration_s);
  while (!g_interrupted && (duration_s <= 0.0 || std::chrono::steady_clock::now() < until)) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

const std::vector<std::string> kConditions{"wrist_enabled", "wrist_locked"};
const std::vector<std::string> kTasks{"drinking", "scratch_level"};

}  // namespace

int main(int argc, char** argv) {
  using namespace exowrist;
  CLI::App app{"Wrist exoskeleton teleoperation simulator and trial analysis"};
  app.require_subcommand(1);

  std::string config_path, out_dir, log_path, dir, bind = "127.0.0.1", participant, session_log;
  std::vector<std::uint64_t> seeds;
  std::string condition_name, task_name = "drinking";
  int threads = -1;
  std::uint16_t port = default_port();
  double duration = 0.0, rate = 1.0;
  bool verbose = false;

  auto* exp = app.add_subcommand("experiment", "Run the randomized trial schedule headless");
  exp->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  exp->add_option("--seed", seeds, "Master seed(s), replacing the config list");
  exp->add_option("--out", out_dir, "Output directory, replacing output_dir");
  exp->add_option("--condition", condition_name, "Run only this condition")->check(CLI::IsMember(kConditions));
  exp->add_option("--threads", threads, "Worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);

  auto* serve = app.add_subcommand("serve", "Run the live 100 Hz loop for an operator client");
  serve->add_option("config", config_path, "YAML experiment config (participants, overrides)")
      ->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port (default $EXOWRIST_PORT or 8571)");
  serve->add_option("--bind", bind, "Listen address");
  serve->add_option("--condition", condition_name, "Experimental condition")->check(CLI::IsMember(kConditions));
  serve->add_option("--task", task_name, "Task")->check(CLI::IsMember(kTasks));
  serve->add_option("--participant", participant, "Participant id from the config");
  serve->add_option("--seed", seeds, "Seed for task jitter and grip capacity")->expected(1);
  serve->add_option("--log", session_log, "Write the session as <base>.csv/.json on exit");
  serve->add_option("--duration", duration, "Stop after this many seconds (0 = until interrupted)");
  serve->add_flag("-v,--verbose", verbose, "Log connections to stderr");

  auto* analyze = app.add_subcommand("analyze", "Metrics and statistics for a directory of logs");
  analyze->add_option("dir", dir, "Directory of <base>.csv/<base>.json logs")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--out", out_dir, "Where to write the report (default: dir)");

  auto* replay = app.add_subcommand("replay", "Stream a logged trial over the wire protocol");
  replay->add_option("log", log_path, "Log base path or either of its files")->required();
  replay->add_option("--port", port, "TCP port (default $EXOWRIST_PORT or 8571)");
  replay->add_option("--bind", bind, "Listen address");
  replay->add_option("--rate", rate, "Playback speed multiplier")->check(CLI::PositiveNumber);
  replay->add_flag("-v,--verbose", verbose, "Log connections to stderr");

  CLI11_PARSE(app, argc, argv);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    std::optional<trials::Condition> condition;
    if (!condition_name.empty()) condition = task::condition_from_string(condition_name);
    const trials::TaskKind task_kind = task::task_kind_from_string(task_name);
    if (*exp) {
      app::ExperimentConfig cfg = app::load_config(config_path);
      if (!seeds.empty()) cfg.seeds = seeds;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (condition) cfg.conditions = {*condition};
      if (threads >= 0) cfg.threads = threads;
      app::run_experiment(cfg, &std::cout);
      return 0;
    }
    if (*analyze) {
      const app::Report r = app::analyze_dir(dir);
      app::write_report(r, out_dir.empty() ? dir : out_dir);
      std::cout << app::report_text(r);
      return 0;
    }
    if (*serve) {
      app::ServeOptions opt;
      if (!config_path.empty()) {
        const app::ExperimentConfig cfg = app::load_config(config_path);
        opt.sim = cfg.sim;
        opt.participant = cfg.participants.front();
        if (!participant.empty()) {
          const auto it = std::find_if(cfg.participants.begin(), cfg.participants.end(),
                                       [&](const trials::Participant& p) { return p.id == participant; });
          if (it == cfg.participants.end()) throw ConfigError("no participant '" + participant + "' in config");
          opt.participant = *it;
        }
      } else if (!participant.empty()) {
        const auto all = trials::default_participants();
        const auto it = std::find_if(all.begin(), all.end(),
                                     [&](const trials::Participant& p) { return p.id == participant; });
        if (it == all.end()) throw ConfigError("no participant '" + participant + "'");
        opt.participant = *it;
      }
      opt.net.bind_address = bind;
      opt.net.port = port;
      opt.net.verbose = verbose;
      if (condition) opt.condition = *condition;
      opt.task = task_kind;
      if (!seeds.empty()) opt.seed = seeds.front();
      opt.log_base = session_log;
      app::Server server(opt);
      server.start();
      std::cout << "serving on " << bind << ":" << server.port() << " (" << task::to_string(opt.condition) << ", "
                << task::to_string(opt.task) << ", " << opt.participant.id << ")" << std::endl;
      wait_for_interrupt(duration);
      server.stop();
      const auto st = server.tick_stats();
      std::cout << "ticks " << st.ticks << ", lateness p99 " << st.p99_lateness_ms << " ms" << std::endl;
      return 0;
    }
    if (*replay) {
      app::ReplayOptions opt;
      opt.net.bind_address = bind;
      opt.net.port = port;
      opt.net.verbose = verbose;
      opt.log = log_path;
      opt.rate = rate;
      app::Replayer rp(opt);
      rp.start();
      std::cout << "replaying " << log_path << " on " << bind << ":" << rp.port() << std::endl;
      std::thread waiter([&] {
        rp.wait();
        g_interrupted = true;
      });
      wait_for_interrupt(0.0);
      std::this_thread::sleep_for(std::chrono::milliseconds(200));  // let the tail drain
      rp.stop();
      waiter.join();
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "exowrist: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "exowrist: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
