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

#include "exowrist_app/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace exowrist::app {
namespace fs = std::filesystem;

std::string log_stem(const trials::TrialConfig& cfg) {
  char idx[16];
  std::snprintf(idx, sizeof idx, "t%03d", cfg.trial_index);
  return std::string(idx) + "_" + cfg.participant_id + "_" + std::string(task::to_string(cfg.task.kind)) + "_" +
         std::string(task::to_string(cfg.condition)) + "_r" + std::to_string(cfg.repetition);
}

std::vector<trials::TrialConfig> build_schedule(const ExperimentConfig& cfg, std::uint64_t seed) {
  trials::ScheduleOptions opt;
  opt.trials_per_condition = cfg.trials_per_condition;
  opt.tasks = cfg.tasks;
  auto all = trials::randomize_schedule(cfg.participants, seed, opt);
  std::vector<trials::TrialConfig> out;
  for (auto& t : all) {
    if (std::find(cfg.conditions.begin(), cfg.conditions.end(), t.condition) != cfg.conditions.end()) {
      out.push_back(std::move(t));
    }
  }
  return out;
}

namespace {

bool logged(const fs::path& base) {
  return fs::exists(fs::path(base).concat(".csv")) && fs::exists(fs::path(base).concat(".json"));
}

// Logs are written under a temporary stem and renamed, sidecar last, so an
// interrupted run never leaves a pair that looks complete.
void write_atomically(const trials::TrialRecord& rec, const fs::path& base) {
  const fs::path part = fs::path(base).concat(".part");
  trials::write_log(rec, part);
  fs::rename(fs::path(part).concat(".csv"), fs::path(base).concat(".csv"));
  fs::rename(fs::path(part).concat(".json"), fs::path(base).concat(".json"));
}

void remove_partials(const fs::path& dir) {
  std::vector<fs::path> stale;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().stem().extension() == ".part") stale.push_back(e.path());
  }
  for (const auto& p : stale) fs::remove(p);
}

}  // namespace

std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  std::vector<SeedRun> runs;
  for (const std::uint64_t seed : cfg.seeds) {
    SeedRun run;
    run.seed = seed;
    run.dir = cfg.output_dir / ("seed_" + std::to_string(seed));
    const fs::path logs = run.dir / "logs";
    fs::create_directories(logs);
    remove_partials(logs);

    const auto schedule = build_schedule(cfg, seed);
    // Reachability is a config property; fail before any trial runs.
    for (const auto& t : schedule) trials::check_reachable(cfg.sim, t.task);

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      if (logged(logs / log_stem(schedule[i]))) {
        ++run.trials_skipped;
      } else {
        todo.push_back(i);
      }
    }

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(todo.size())));

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto worker = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) return;
        try {
          const auto& tc = schedule[todo[k]];
          write_atomically(trials::run_trial(tc, cfg.sim), logs / log_stem(tc));
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          next = todo.size();
        }
      }
    };
    if (!todo.empty()) {
      std::vector<std::thread> pool;
      for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    run.trials_run = static_cast<int>(todo.size());

    run.report = analyze_dir(logs);
    write_report(run.report, run.dir);
    if (progress) {
      *progress << "seed " << seed << ": " << run.trials_run << " trials run, " << run.trials_skipped
                << " resumed from " << logs.string() << "\n"
                << headline(run.report);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace exowrist::app
