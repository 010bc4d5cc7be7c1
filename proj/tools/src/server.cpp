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

#include "exowrist_app/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <deque>
#include <iostream>
#include <map>
#include <optional>

#include "exowrist/rng.hpp"
#include "exowrist/simulator.hpp"
#include "exowrist/teleop.hpp"

namespace exowrist::app {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Clock = std::chrono::steady_clock;

namespace {

std::mutex log_mu;

void note(bool on, const std::string& msg) {
  if (!on) return;
  std::lock_guard<std::mutex> lock(log_mu);
  std::cerr << "exowrist: " << msg << "\n";
}

}  // namespace

class Session;

class Hub {
 public:
  struct Inbound {
    std::uint64_t session = 0;
    wire::Payload payload;
  };

  explicit Hub(NetOptions opt) : opt_(std::move(opt)), acceptor_(ioc_) {}
  ~Hub() { stop(); }

  void start() {
    beast::error_code ec;
    const auto addr = asio::ip::make_address(opt_.bind_address, ec);
    if (ec) throw Error("bad bind address '" + opt_.bind_address + "'");
    const tcp::endpoint ep(addr, opt_.port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error("cannot listen on " + opt_.bind_address + ":" + std::to_string(opt_.port) + ": " + ec.message());
    }
    port_ = acceptor_.local_endpoint().port();
    accept();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  void stop() {
    if (!thread_.joinable()) return;
    ioc_.stop();
    thread_.join();
    sessions_.clear();
  }

  std::uint16_t port() const { return port_; }
  const NetOptions& options() const { return opt_; }
  asio::io_context& ioc() { return ioc_; }

  // Any thread. Never blocks on the network.
  void broadcast(wire::Payload p) {
    const bool is_state = std::holds_alternative<wire::State>(p);
    {
      std::lock_guard<std::mutex> lock(out_mu_);
      outbox_.push_back(std::move(p));
      if (is_state) {
        std::size_t states = 0;
        for (const auto& q : outbox_) states += std::holds_alternative<wire::State>(q);
        if (states > opt_.state_queue) {
          const auto it = std::find_if(outbox_.begin(), outbox_.end(),
                                       [](const wire::Payload& q) { return std::holds_alternative<wire::State>(q); });
          outbox_.erase(it);
        }
      }
    }
    if (!flush_pending_.exchange(true)) asio::post(ioc_, [this] { flush(); });
  }

  // Tick thread.
  bool pop(Inbound& out) {
    std::lock_guard<std::mutex> lock(in_mu_);
    if (inbox_.empty()) return false;
    out = std::move(inbox_.front());
    inbox_.pop_front();
    return true;
  }

  int greeted_clients() const { return greeted_.load(); }

  // io thread only below.
  bool inbox_full() {
    std::lock_guard<std::mutex> lock(in_mu_);
    return inbox_.size() >= opt_.command_queue;
  }
  void push_inbound(std::uint64_t id, wire::Payload p) {
    std::lock_guard<std::mutex> lock(in_mu_);
    inbox_.push_back({id, std::move(p)});
  }
  std::optional<std::uint64_t>& operator_id() { return operator_; }
  void on_greeted() { ++greeted_; }
  void remove(std::uint64_t id, bool was_greeted);

 private:
  void accept();
  void flush();

  NetOptions opt_;
  asio::io_context ioc_;
  tcp::acceptor acceptor_;
  std::thread thread_;
  std::uint16_t port_ = 0;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions_;
  std::optional<std::uint64_t> operator_;
  std::atomic<int> greeted_{0};

  std::mutex out_mu_;
  std::deque<wire::Payload> outbox_;
  std::atomic<bool> flush_pending_{false};

  std::mutex in_mu_;
  std::deque<Inbound> inbox_;
};

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(Hub& hub, tcp::socket sock, std::uint64_t id)
      : hub_(hub), sock_(std::move(sock)), id_(id), line_buf_(64 * 1024), retry_(hub.ioc()) {}

  std::uint64_t id() const { return id_; }
  bool greeted() const { return greeted_; }

  void start() {
    auto self = shared_from_this();
    sock_.async_receive(asio::buffer(peek_), tcp::socket::message_peek,
                        [self](beast::error_code ec, std::size_t n) {
                          if (ec || n == 0) return self->drop();
                          if (self->peek_[0] == 'G') {
                            self->start_ws();
                          } else {
                            self->read_raw();
                          }
                        });
  }

  void send(const wire::Payload& p) {
    if (closed_) return;
    const bool is_state = std::holds_alternative<wire::State>(p);
    if (is_state) {
      if (!greeted_) return;
      if (state_counter_++ % static_cast<std::uint64_t>(decimation_) != 0) return;
    }
    queue_.push_back({wire::encode({++out_seq_, p}), is_state});
    // Drop the oldest queued state that is not already being written.
    std::size_t states = 0;
    for (const auto& q : queue_) states += q.second;
    if (states > hub_.options().state_queue) {
      for (auto it = queue_.begin() + (writing_ ? 1 : 0); it != queue_.end(); ++it) {
        if (it->second) {
          queue_.erase(it);
          break;
        }
      }
    }
    if (!writing_) write_next();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    if (ws_) {
      ws_->next_layer().shutdown(tcp::socket::shutdown_both, ec);
      ws_->next_layer().close(ec);
    } else {
      sock_.shutdown(tcp::socket::shutdown_both, ec);
      sock_.close(ec);
    }
  }

 private:
  void drop() {
    if (dropped_) return;
    dropped_ = true;
    close();
    hub_.remove(id_, greeted_);
  }

  void start_ws() {
    ws_.emplace(std::move(sock_));
    ws_->text(true);
    auto self = shared_from_this();
    ws_->async_accept([self](beast::error_code ec) {
      if (ec) {
        note(self->hub_.options().verbose, "websocket handshake failed: " + ec.message());
        return self->drop();
      }
      self->read_ws();
    });
  }

  void read_raw() {
    if (closed_) return;
    if (hub_.inbox_full()) return pause([](Session& s) { s.read_raw(); });
    auto self = shared_from_this();
    sock_.async_read_some(asio::buffer(raw_buf_), [self](beast::error_code ec, std::size_t n) {
      if (ec) return self->drop();
      self->on_bytes(std::string_view(self->raw_buf_.data(), n));
      self->read_raw();
    });
  }

  void read_ws() {
    if (closed_) return;
    if (hub_.inbox_full()) return pause([](Session& s) { s.read_ws(); });
    auto self = shared_from_this();
    ws_->async_read(ws_buf_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->drop();
      std::string frame = beast::buffers_to_string(self->ws_buf_.data());
      self->ws_buf_.consume(self->ws_buf_.size());
      if (frame.empty() || frame.back() != '\n') frame.push_back('\n');
      self->on_bytes(frame);
      self->read_ws();
    });
  }

  template <typename F>
  void pause(F resume) {
    auto self = shared_from_this();
    retry_.expires_after(std::chrono::milliseconds(5));
    retry_.async_wait([self, resume](beast::error_code ec) {
      if (!ec) resume(*self);
    });
  }

  void on_bytes(std::string_view bytes) {
    line_buf_.append(bytes);
    try {
      while (auto line = line_buf_.next_line()) {
        if (!line->empty() && line->back() == '\r') line->pop_back();
        if (!line->empty()) handle_line(*line);
        if (closing_) return;
      }
    } catch (const wire::ProtocolError& e) {
      fail("line_too_long", e.what());
    }
  }

  void error(const std::string& code, const std::string& text) {
    note(hub_.options().verbose, "client " + std::to_string(id_) + ": " + code + ": " + text);
    send(wire::ErrorMsg{code, text});
  }

  // Reports, then resets the connection once the error has been written.
  void fail(const std::string& code, const std::string& text) {
    error(code, text);
    closing_ = true;
    if (!writing_) drop();
  }

  void handle_line(const std::string& line) {
    wire::Message m;
    try {
      m = wire::decode(line);
    } catch (const wire::ProtocolError& e) {
      return error("bad_message", e.what());
    }
    try {
      seq_.check(m);
    } catch (const wire::ProtocolError& e) {
      return fail("bad_seq", e.what());
    }

    if (const auto* h = std::get_if<wire::Hello>(&m.payload)) {
      if (greeted_) return error("duplicate_hello", "hello already received");
      if (h->version != wire::kProtocolVersion) {
        return fail("version_mismatch", "server speaks version " + std::to_string(wire::kProtocolVersion));
      }
      if (h->role == "operator") {
        auto& op = hub_.operator_id();
        if (op && *op != id_) return fail("operator_busy", "another operator is connected");
        op = id_;
      } else if (h->role != "observer") {
        return fail("bad_role", "role must be operator or observer");
      }
      role_ = h->role;
      decimation_ = std::clamp(h->decimation, 1, 100);
      greeted_ = true;
      hub_.on_greeted();
      note(hub_.options().verbose, "client " + std::to_string(id_) + " joined as " + role_);
      return send(wire::Hello{wire::kProtocolVersion, "simulator", decimation_});
    }
    if (!greeted_) return error("no_hello", "send hello first");

    if (const auto* c = std::get_if<wire::Command>(&m.payload)) {
      if (role_ != "operator") return error("not_operator", "observers cannot command");
      for (const double a : c->axes) {
        if (!std::isfinite(a) || a < -1.0 || a > 1.0) return error("bad_axes", "axes must lie in [-1, 1]");
      }
      return hub_.push_inbound(id_, m.payload);
    }
    if (std::holds_alternative<wire::Event>(m.payload)) {
      if (role_ != "operator") return error("not_operator", "observers cannot send events");
      return hub_.push_inbound(id_, m.payload);
    }
    // Clients have no business sending state; errors from them are only logged.
    if (const auto* e = std::get_if<wire::ErrorMsg>(&m.payload)) {
      note(hub_.options().verbose, "client " + std::to_string(id_) + " reported " + e->code + ": " + e->text);
    }
  }

  void write_next() {
    if (queue_.empty() || closed_) {
      writing_ = false;
      if (closing_) drop();
      return;
    }
    writing_ = true;
    auto self = shared_from_this();
    auto done = [self](beast::error_code ec, std::size_t) {
      if (!self->queue_.empty()) self->queue_.pop_front();
      if (ec) {
        self->writing_ = false;
        return self->drop();
      }
      self->write_next();
    };
    if (ws_) {
      ws_->async_write(asio::buffer(queue_.front().first), done);
    } else {
      asio::async_write(sock_, asio::buffer(queue_.front().first), done);
    }
  }

  Hub& hub_;
  tcp::socket sock_;
  std::optional<websocket::stream<tcp::socket>> ws_;
  std::uint64_t id_;
  std::array<char, 1> peek_{};
  std::array<char, 4096> raw_buf_{};
  beast::flat_buffer ws_buf_;
  wire::LineBuffer line_buf_;
  wire::SeqChecker seq_;
  asio::steady_timer retry_;
  std::deque<std::pair<std::string, bool>> queue_;  // line, is_state
  std::uint64_t out_seq_ = 0;
  std::uint64_t state_counter_ = 0;
  std::string role_;
  int decimation_ = 1;
  bool greeted_ = false;
  bool writing_ = false;
  bool closing_ = false;
  bool closed_ = false;
  bool dropped_ = false;
};

void Hub::accept() {
  acceptor_.async_accept([this](beast::error_code ec, tcp::socket sock) {
    if (ec) {
      if (ec != asio::error::operation_aborted) accept();
      return;
    }
    beast::error_code ignored;
    sock.set_option(tcp::no_delay(true), ignored);
    const std::uint64_t id = next_id_++;
    note(opt_.verbose, "client " + std::to_string(id) + " connected");
    auto s = std::make_shared<Session>(*this, std::move(sock), id);
    sessions_[id] = s;
    s->start();
    accept();
  });
}

void Hub::remove(std::uint64_t id, bool was_greeted) {
  note(opt_.verbose, "client " + std::to_string(id) + " disconnected");
  sessions_.erase(id);
  if (was_greeted) --greeted_;
  if (operator_ && *operator_ == id) operator_.reset();
}

void Hub::flush() {
  flush_pending_ = false;
  std::deque<wire::Payload> batch;
  {
    std::lock_guard<std::mutex> lock(out_mu_);
    batch.swap(outbox_);
  }
  // Copy: a failed write may remove a session while we iterate.
  std::vector<std::shared_ptr<Session>> targets;
  for (const auto& kv : sessions_) {
    if (kv.second->greeted()) targets.push_back(kv.second);
  }
  for (const auto& p : batch) {
    for (const auto& s : targets) s->send(p);
  }
}

namespace {

wire::State to_wire_state(const trials::Sample& s, trials::Condition c, bool estop, bool stale) {
  wire::State w;
  w.t = s.t;
  w.q_deg = s.q_deg;
  w.grasp = s.grasp;
  w.hand_pos_m = s.hand;
  w.tilt_deg = s.tilt_total_deg;
  w.tilt_corr_deg = s.tilt_corr_deg;
  w.theta_ref_deg = s.theta_ref_deg;
  w.condition = std::string(task::to_string(c));
  w.flags = {s.flag_speed != 0, s.flag_rom != 0, estop, stale};
  return w;
}

}  // namespace

Server::Server(ServeOptions opt) : opt_(std::move(opt)) {}

Server::~Server() { stop(); }

void Server::start() {
  if (running_) return;
  hub_ = std::make_unique<Hub>(opt_.net);
  hub_->start();
  running_ = true;
  tick_thread_ = std::thread([this] { tick_loop(); });
}

std::uint16_t Server::port() const { return hub_ ? hub_->port() : 0; }

void Server::stop() {
  if (!running_.exchange(false)) return;
  tick_thread_.join();
  hub_->stop();
  if (opt_.log_base.empty() || session_.samples.empty()) return;
  try {
    trials::finalize_outcome(session_, opt_.sim);
  } catch (const InapplicableError& e) {
    note(true, std::string("session log left unclassified: ") + e.what());
  }
  trials::write_log(session_, opt_.log_base);
}

TickStats Server::tick_stats() const {
  std::lock_guard<std::mutex> lock(stats_mu_);
  TickStats s;
  s.ticks = static_cast<std::int64_t>(lateness_ms_.size());
  if (lateness_ms_.empty()) return s;
  std::vector<double> v = lateness_ms_;
  std::sort(v.begin(), v.end());
  s.p99_lateness_ms = v[static_cast<std::size_t>(0.99 * static_cast<double>(v.size() - 1))];
  s.max_lateness_ms = v.back();
  return s;
}

void Server::tick_loop() {
  const auto& p = opt_.sim;
  trials::TrialConfig cfg;
  cfg.participant_id = opt_.participant.id;
  cfg.condition = opt_.condition;
  cfg.seed = opt_.seed;
  cfg.rom = opt_.participant.rom;
  cfg.operator_speed = opt_.participant.speed_scale;
  Rng task_rng(derive_seed(cfg.seed, 0));
  cfg.task = task::build_task(opt_.task, task::SceneGeometry{}, task_rng);
  session_ = trials::TrialRecord{};
  session_.config = cfg;

  trials::Simulator sim(p, cfg.condition, cfg.rom, cfg.task, derive_seed(cfg.seed, 2));
  teleop::StalenessGuard guard(opt_.staleness);
  bool finished = false;

  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(p.dt));
  auto next = Clock::now();
  while (running_) {
    Hub::Inbound in;
    while (hub_->pop(in)) {
      if (const auto* c = std::get_if<wire::Command>(&in.payload)) {
        teleop::OperatorCommand oc;
        oc.set_axes(c->axes);
        oc.grasp_event = c->buttons.grasp     ? teleop::GraspEvent::grasp
                         : c->buttons.release ? teleop::GraspEvent::release
                                              : teleop::GraspEvent::none;
        oc.timestamp = sim.time();
        guard.on_command(oc, sim.time());
      } else if (const auto* e = std::get_if<wire::Event>(&in.payload)) {
        if (e->name == "estop" || e->name == "stop") {
          sim.set_estop(true);
          hub_->broadcast(wire::Event{"estop", sim.time()});
        } else if (e->name == "resume") {
          sim.set_estop(false);
          hub_->broadcast(wire::Event{"resume", sim.time()});
        }
      }
    }

    const bool stale = guard.stale(sim.time());
    const teleop::OperatorCommand cmd = guard.current(sim.time());
    trials::Simulator::Tick tick = sim.step(cmd);
    if (!finished) {
      session_.samples.push_back(tick.sample);
      for (const auto& e : tick.events) session_.events.push_back(e);
      finished = tick.terminal;
    }
    for (const auto& e : tick.events) hub_->broadcast(wire::Event{e.name, e.t});
    hub_->broadcast(to_wire_state(tick.sample, cfg.condition, sim.estopped(), stale));

    next += period;
    std::this_thread::sleep_until(next);
    const auto now = Clock::now();
    const double late = std::chrono::duration<double, std::milli>(now - next).count();
    {
      std::lock_guard<std::mutex> lock(stats_mu_);
      lateness_ms_.push_back(late);
    }
    // Far behind (suspended process): resynchronize instead of bursting.
    if (now - next > 10 * period) next = now;
  }
}

Replayer::Replayer(ReplayOptions opt) : opt_(std::move(opt)), rec_(trials::read_log(opt_.log)) {
  if (!(opt_.rate > 0.0)) throw ConfigError("replay rate must be > 0");
}

Replayer::~Replayer() { stop(); }

void Replayer::start() {
  if (running_) return;
  hub_ = std::make_unique<Hub>(opt_.net);
  hub_->start();
  running_ = true;
  thread_ = std::thread([this] { run(); });
}

std::uint16_t Replayer::port() const { return hub_ ? hub_->port() : 0; }

void Replayer::wait() {
  if (thread_.joinable()) thread_.join();
}

void Replayer::stop() {
  running_ = false;
  wait();
  if (hub_) hub_->stop();
}

void Replayer::run() {
  while (running_ && hub_->greeted_clients() == 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  std::size_t ev = 0;
  auto next = Clock::now();
  const auto period =
      std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(0.01 / opt_.rate));
  Hub::Inbound ignored;
  for (const auto& s : rec_.samples) {
    if (!running_) return;
    while (hub_->pop(ignored)) {
    }
    for (; ev < rec_.events.size() && rec_.events[ev].t <= s.t + 1e-9; ++ev) {
      hub_->broadcast(wire::Event{rec_.events[ev].name, rec_.events[ev].t});
    }
    hub_->broadcast(to_wire_state(s, rec_.config.condition, false, false));
    next += period;
    std::this_thread::sleep_until(next);
  }
  for (; ev < rec_.events.size(); ++ev) hub_->broadcast(wire::Event{rec_.events[ev].name, rec_.events[ev].t});
  hub_->broadcast(wire::Event{"replay_end", rec_.samples.empty() ? 0.0 : rec_.samples.back().t});
}

}  // namespace exowrist::app
