#include "blexer/net/hub.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <map>
#include <unordered_map>
#include <variant>

#include <boost/asio.hpp>

#include "blexer/cam/config_io.hpp"
#include "blexer/common/bounded_queue.hpp"
#include "blexer/common/error.hpp"
#include "blexer/common/hash.hpp"
#include "blexer/iam/recorder.hpp"
#include "blexer/ingest/session.hpp"
#include "blexer/net/api_server.hpp"
#include "blexer/net/line_connection.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/wire/codec.hpp"
#include "blexer/wire/handshake.hpp"
#include "blexer/wire/payload_json.hpp"

namespace blexer::net {

using json = nlohmann::json;
namespace asio = boost::asio;
using udp = asio::ip::udp;

namespace {

std::uint64_t steady_ns() {
  using namespace std::chrono;
  return static_cast<std::uint64_t>(
      duration_cast<nanoseconds>(steady_clock::now().time_since_epoch()).count());
}

// Completes a command exactly once; a command that never reaches the engine
// (dropped by the full queue, or left over at shutdown) answers 503.
struct PendingReply {
  explicit PendingReply(ReplyFn f) : fn(std::move(f)) {}
  ~PendingReply() {
    if (!done && fn) fn({503, {{"error", "command dropped: queue overflow or shutdown"}}});
  }
  void send(CommandReply r) {
    if (done) return;
    done = true;
    if (fn) fn(std::move(r));
  }
  ReplyFn fn;
  bool done = false;
};
using ReplyPtr = std::shared_ptr<PendingReply>;

struct SampleCmd {
  ingest::Sample sample;
  std::uint64_t recv_ns = 0;
};
struct ReportCmd {
  ipm::PerformanceReport report;
  TimeMs hub_ts = 0;
};
struct OverrideCmd {
  iam::OverrideCommand cmd;
  ReplyPtr reply;
};
struct PlanCmd {
  cam::TherapyPlan plan;
  ReplyPtr reply;
};
struct AckCmd {
  std::uint64_t id = 0;
  ReplyPtr reply;
};
struct ClosedCmd {
  std::string device;
  bool expected = false;
  TimeMs t = 0;
};

using Command = std::variant<SampleCmd, ReportCmd, OverrideCmd, PlanCmd, AckCmd, ClosedCmd>;

std::optional<wire::DeviceType> expected_device(int listener) {
  switch (listener) {
    case 0: return wire::DeviceType::EcgChest;
    case 1: return wire::DeviceType::PpgWrist;
    case 2: return wire::DeviceType::Game;
    case 3: return wire::DeviceType::Mocap;
  }
  return std::nullopt;
}

std::string event(std::string_view type, json data) {
  return json{{"type", type}, {"data", std::move(data)}}.dump();
}

json error_body(const std::exception& e) {
  if (const auto* be = dynamic_cast<const Error*>(&e))
    return {{"error", std::string(to_string(be->code()))}, {"field", be->field()},
            {"detail", be->what()}};
  return {{"error", e.what()}};
}

constexpr std::size_t kLatencyKeep = 100'000;
constexpr TimeMs kHelloTimeoutMs = 10'000;

}  // namespace

void Subscription::push(std::shared_ptr<const std::string> e) {
  std::function<void()> wake;
  {
    std::lock_guard lock(mutex_);
    if (items_.size() >= capacity_ && !items_.empty()) {
      items_.pop_front();
      ++dropped_;
    }
    items_.push_back(std::move(e));
    if (waiting_) {
      waiting_ = false;
      wake = wake_;
    }
  }
  if (wake) wake();
}

std::vector<std::shared_ptr<const std::string>> Subscription::take() {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<const std::string>> out(items_.begin(), items_.end());
  items_.clear();
  if (out.empty()) waiting_ = true;
  return out;
}

std::uint64_t Subscription::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

struct Hub::Impl {
  struct TcpPeer {
    std::uint64_t id = 0;
    int listener = 0;
    std::shared_ptr<LineConnection> conn;
    wire::ConnState st;
    std::optional<ingest::SensorSession> session;
    TimeMs opened_at = 0;
    bool timed_out = false;
  };
  struct UdpPeer {
    wire::ConnState st;
    std::optional<ingest::SensorSession> session;
  };

  Impl(Hub& h) : hub(h), queue(h.config_.queue_capacity) {}

  Hub& hub;
  asio::io_context io;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  std::vector<std::unique_ptr<asio::ip::tcp::acceptor>> acceptors;
  std::unique_ptr<udp::socket> udp_socket;
  udp::endpoint udp_from;
  std::array<char, wire::kMaxFrameBytes + 1> udp_buffer{};
  std::unique_ptr<asio::steady_timer> heartbeat;
  std::unique_ptr<ApiServer> api;
  std::thread io_thread;
  std::thread engine_thread;

  // io thread only
  std::map<std::uint64_t, std::shared_ptr<TcpPeer>> peers;
  std::map<udp::endpoint, UdpPeer> udp_peers;
  std::uint64_t next_peer = 1;
  cam::Directive io_directive;
  bool io_stopping = false;

  // engine thread only
  std::unique_ptr<runtime::Engine> engine;
  std::unique_ptr<iam::Recorder> recorder;
  std::vector<std::uint64_t> pending_recv;
  std::size_t reports_seen = 0;
  double success_sum = 0.0;
  bool storage_alerted = false;

  BoundedQueue<Command> queue;
  std::atomic<bool> stopping{false};
  std::atomic<bool> storage_failed{false};
  std::atomic<bool> started{false};

  mutable std::mutex snap_mutex;
  std::shared_ptr<const Snapshot> snap = std::make_shared<Snapshot>();

  mutable std::mutex subs_mutex;
  std::vector<std::shared_ptr<Subscription>> subs;

  mutable std::mutex lat_mutex;
  std::vector<double> latencies;
  std::size_t lat_next = 0;

  void broadcast(std::string_view type, json data) {
    auto e = std::make_shared<const std::string>(event(type, std::move(data)));
    std::vector<std::shared_ptr<Subscription>> targets;
    {
      std::lock_guard lock(subs_mutex);
      targets = subs;
    }
    for (auto& s : targets) s->push(e);
  }

  void record_latency(double ms) {
    std::lock_guard lock(lat_mutex);
    if (latencies.size() < kLatencyKeep) {
      latencies.push_back(ms);
    } else {
      latencies[lat_next] = ms;
      lat_next = (lat_next + 1) % kLatencyKeep;
    }
  }

  // ---- engine thread ----

  void install_hooks() {
    runtime::EngineHooks hooks;
    hooks.frame = [this](const fusion::FusedFrame& f) {
      const std::uint64_t now = steady_ns();
      for (std::uint64_t r : pending_recv)
        record_latency(static_cast<double>(now - std::min(now, r)) / 1e6);
      pending_recv.clear();
      if (f.t % 500 == 0) broadcast("frame", fusion::to_json(f));
    };
    hooks.state = [this](const cam::UserState& s) { broadcast("state", cam::to_json(s)); };
    hooks.directive = [this](const cam::Directive& d) {
      broadcast("directive", wire::to_json(d));
      asio::post(io, [this, d] { fan_out(d); });
    };
    hooks.alert = [this](const iam::Alert& a) { broadcast("alert", wire::to_json(a)); };
    hooks.report = [this](const ipm::PerformanceReport& r) {
      broadcast("report", wire::to_json(r));
    };
    engine->set_hooks(std::move(hooks));
  }

  void handle(Command& c) {
    const TimeMs now = wall_clock_ms();
    engine->advance_to(now);
    std::visit(
        [&](auto& cmd) {
          using T = std::decay_t<decltype(cmd)>;
          if constexpr (std::is_same_v<T, SampleCmd>) {
            if (!engine->active()) return;
            engine->ingest(cmd.sample);
            if (cmd.recv_ns) pending_recv.push_back(cmd.recv_ns);
          } else if constexpr (std::is_same_v<T, ReportCmd>) {
            if (!engine->active()) return;
            engine->on_report(cmd.report, cmd.hub_ts);
            ++reports_seen;
            success_sum += cmd.report.success_rate;
          } else if constexpr (std::is_same_v<T, OverrideCmd>) {
            try {
              cmd.cmd.t = now;
              const cam::Directive d = engine->apply_override(cmd.cmd, now);
              cmd.reply->send({200, json{{"directive", wire::to_json(d)}}});
            } catch (const Error& e) {
              cmd.reply->send({e.code() == Errc::NoActiveSession ? 409 : 400, error_body(e)});
            }
          } else if constexpr (std::is_same_v<T, PlanCmd>) {
            try {
              engine->set_plan(cmd.plan, now);
              cmd.reply->send({200, cam::to_json(cmd.plan)});
            } catch (const Error& e) {
              cmd.reply->send({e.code() == Errc::NoActiveSession ? 409 : 400, error_body(e)});
            }
          } else if constexpr (std::is_same_v<T, AckCmd>) {
            if (engine->acknowledge_alert(cmd.id))
              cmd.reply->send({200, {{"id", cmd.id}, {"acknowledged", true}}});
            else
              cmd.reply->send({404, {{"error", "unknown alert"}, {"id", cmd.id}}});
          } else if constexpr (std::is_same_v<T, ClosedCmd>) {
            if (engine->active()) engine->connection_closed(cmd.device, cmd.expected, cmd.t);
          }
        },
        c);
  }

  json live_summary() const {
    json counts = json::object();
    for (auto s : {LogStream::Raw, LogStream::Fused, LogStream::States, LogStream::Directives,
                   LogStream::Reports, LogStream::Alerts, LogStream::Overrides}) {
      std::string name(file_name(s));
      name = name.substr(0, name.find('.'));
      counts[name] = recorder ? recorder->count(s) : 0;
    }
    json cats = json::object();
    for (const auto& [c, n] : engine->context().category_counts) cats[std::string(cam::to_string(c))] = n;
    json alerts = json::array();
    for (const auto& a : engine->alerts()) alerts.push_back(wire::to_json(a));
    json j{{"session_id", hub.session_id_},
           {"started_at", engine->start_time()},
           {"ended_at", nullptr},
           {"live", true},
           {"recording", recorder != nullptr && !recorder->failed()},
           {"inputs", engine->inputs()},
           {"directives", engine->directives_emitted()},
           {"counts", counts},
           {"category_counts", cats},
           {"reports", {{"count", reports_seen},
                        {"mean_success", reports_seen ? json(success_sum / reports_seen)
                                                      : json(nullptr)}}},
           {"alerts", alerts},
           {"plan", cam::to_json(engine->config().plan)},
           {"last_directive", wire::to_json(engine->current_directive())}};
    j["last_state"] = engine->last_state() ? cam::to_json(*engine->last_state()) : json(nullptr);
    return j;
  }

  void publish() {
    auto s = std::make_shared<Snapshot>();
    s->session_id = hub.session_id_;
    s->started_at = engine->start_time();
    s->now = engine->now();
    s->active = engine->active();
    s->state = engine->last_state();
    s->frame = engine->last_frame();
    s->directive = engine->current_directive();
    s->plan = engine->config().plan;
    s->rules = engine->config().rules;
    s->alerts = engine->alerts();
    s->summary = live_summary();
    s->state_hash = engine->state_hash();
    std::lock_guard lock(snap_mutex);
    snap = std::move(s);
  }

  void engine_loop() {
    using namespace std::chrono;
    while (!stopping.load()) {
      const TimeMs wall = wall_clock_ms();
      const TimeMs due = (wall / fusion::kFramePeriodMs + 1) * fusion::kFramePeriodMs;
      const auto wait = milliseconds(std::clamp<TimeMs>(due - wall, 0, fusion::kFramePeriodMs));
      auto cmd = queue.pop_until(steady_clock::now() + wait);
      engine->advance_to(wall_clock_ms());
      if (cmd) handle(*cmd);
      while (auto more = queue.try_pop()) handle(*more);
      if (storage_failed.load() && !storage_alerted) {
        storage_alerted = true;
        engine->data_quality("session log storage failed; continuing without persistence",
                             iam::Severity::Critical, wall_clock_ms());
      }
      publish();
    }
    while (auto more = queue.try_pop()) handle(*more);
    const TimeMs end = wall_clock_ms();
    engine->close(end);
    publish();
    if (recorder) {
      recorder->flush();
      json meta = engine->meta();
      meta["ended_at"] = end;
      try {
        iam::write_session_meta(hub.session_dir(), meta);
      } catch (const std::exception&) {
      }
    }
  }

  // ---- io thread ----

  void fan_out(const cam::Directive& d) {
    io_directive = d;
    for (auto& [id, p] : peers) {
      if (p->listener != 2 || p->st.phase != wire::ConnPhase::Active) continue;
      send_directive(*p, d);
    }
  }

  void send_directive(TcpPeer& p, const cam::Directive& d) {
    const auto env = wire::stamp_outbound(p.st, d, wall_clock_ms());
    p.conn->send(wire::encode(env));
    ++hub.counters_.directives_sent;
  }

  void accept(int listener) {
    acceptors[listener]->async_accept([this, listener](const boost::system::error_code& ec,
                                                       asio::ip::tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted && !io_stopping) accept(listener);
        return;
      }
      auto p = std::make_shared<TcpPeer>();
      p->id = next_peer++;
      p->listener = listener;
      p->opened_at = wall_clock_ms();
      p->conn = std::make_shared<LineConnection>(std::move(socket));
      peers[p->id] = p;
      ++hub.counters_.connections;
      std::weak_ptr<TcpPeer> weak = p;
      p->conn->start(
          [this, weak](std::string_view line) {
            if (auto sp = weak.lock()) on_line(*sp, line);
          },
          [this, weak](const boost::system::error_code&) {
            if (auto sp = weak.lock()) on_closed(*sp);
          });
      accept(listener);
    });
  }

  void violation(TcpPeer& p, const std::string& reason) {
    ++hub.counters_.violations;
    if (p.st.phase != wire::ConnPhase::Closed) {
      const auto bye = wire::stamp_outbound(p.st, wire::ByeMsg{reason}, wall_clock_ms());
      p.conn->send(wire::encode(bye));
    }
    p.conn->close();
  }

  void on_line(TcpPeer& p, std::string_view line) {
    const std::uint64_t recv_ns = steady_ns();
    const TimeMs now = wall_clock_ms();
    wire::Envelope env;
    try {
      env = wire::decode(line);
    } catch (const Error&) {
      ++hub.counters_.malformed;
      return;
    }
    const bool was_waiting = p.st.phase == wire::ConnPhase::AwaitHello;
    wire::StepResult step;
    try {
      step = wire::handshake_step(p.st, env, now, hub.session_id_);
    } catch (const Error& e) {
      violation(p, e.what());
      return;
    }
    if (was_waiting && step.state.phase == wire::ConnPhase::Active) {
      const auto device = step.state.peer->device_type;
      if (device != expected_device(p.listener)) {
        violation(p, "device type " + std::string(wire::to_string(device)) +
                         " not accepted on this port");
        return;
      }
      p.st = step.state;
      if (step.reply) p.conn->send(wire::encode(*step.reply));
      if (p.listener == 2) {
        send_directive(p, io_directive);
      } else {
        p.session.emplace(hub.session_id_, device);
      }
      return;
    }
    p.st = step.state;
    if (p.st.phase == wire::ConnPhase::Closed) {
      p.conn->close();
      return;
    }
    if (!wire::is_data(env.type())) return;

    if (p.listener == 2) {
      if (const auto* r = std::get_if<ipm::PerformanceReport>(&env.payload)) {
        ++hub.counters_.reports;
        queue.push(ReportCmd{*r, now});
      } else {
        ++hub.counters_.rejected_packets;
      }
      return;
    }
    try {
      for (auto& s : p.session->accept_packet(env, now, recv_ns)) {
        ++hub.counters_.samples;
        queue.push(SampleCmd{std::move(s), recv_ns});
      }
    } catch (const Error&) {
      ++hub.counters_.rejected_packets;
    }
  }

  void on_closed(TcpPeer& p) {
    const auto peer = peers.find(p.id);
    if (peer == peers.end()) return;
    auto keep = peer->second;
    peers.erase(peer);
    if (!p.st.peer) return;  // never completed HELLO
    const bool expected = (p.st.closed_by_peer || io_stopping) && !p.timed_out;
    queue.push(ClosedCmd{std::string(wire::to_string(p.st.peer->device_type)), expected,
                         wall_clock_ms()});
  }

  void receive_udp() {
    udp_socket->async_receive_from(
        asio::buffer(udp_buffer), udp_from,
        [this](const boost::system::error_code& ec, std::size_t n) {
          if (ec) {
            if (ec != asio::error::operation_aborted && !io_stopping) receive_udp();
            return;
          }
          on_datagram(std::string_view(udp_buffer.data(), n), udp_from);
          receive_udp();
        });
  }

  void send_udp(const udp::endpoint& to, const wire::Envelope& env) {
    auto bytes = std::make_shared<std::string>(wire::encode_datagram(env));
    udp_socket->async_send_to(asio::buffer(*bytes), to,
                              [bytes](const boost::system::error_code&, std::size_t) {});
  }

  void on_datagram(std::string_view bytes, const udp::endpoint& from) {
    const std::uint64_t recv_ns = steady_ns();
    const TimeMs now = wall_clock_ms();
    wire::Envelope env;
    try {
      env = wire::decode(bytes);
    } catch (const Error&) {
      ++hub.counters_.malformed;
      return;
    }
    UdpPeer& p = udp_peers[from];
    const bool was_waiting = p.st.phase == wire::ConnPhase::AwaitHello;
    wire::StepResult step;
    try {
      step = wire::handshake_step(p.st, env, now, hub.session_id_);
    } catch (const Error&) {
      ++hub.counters_.violations;
      if (!p.st.peer) udp_peers.erase(from);
      return;
    }
    if (was_waiting && step.state.phase == wire::ConnPhase::Active) {
      if (step.state.peer->device_type != wire::DeviceType::Mocap) {
        ++hub.counters_.violations;
        udp_peers.erase(from);
        return;
      }
      ++hub.counters_.connections;
      p.st = step.state;
      if (step.reply) send_udp(from, *step.reply);
      p.session.emplace(hub.session_id_, wire::DeviceType::Mocap);
      return;
    }
    p.st = step.state;
    if (p.st.phase == wire::ConnPhase::Closed) {
      queue.push(ClosedCmd{std::string(wire::to_string(wire::DeviceType::Mocap)), true, now});
      udp_peers.erase(from);
      return;
    }
    if (!wire::is_data(env.type())) return;
    try {
      for (auto& s : p.session->accept_packet(env, now, recv_ns)) {
        ++hub.counters_.samples;
        queue.push(SampleCmd{std::move(s), recv_ns});
      }
    } catch (const Error&) {
      ++hub.counters_.rejected_packets;
    }
  }

  void heartbeat_tick() {
    heartbeat->expires_after(std::chrono::milliseconds(wire::kHeartbeatIntervalMs));
    heartbeat->async_wait([this](const boost::system::error_code& ec) {
      if (ec || io_stopping) return;
      const TimeMs now = wall_clock_ms();
      std::vector<std::shared_ptr<TcpPeer>> stale;
      for (auto& [id, p] : peers) {
        if (p->st.phase == wire::ConnPhase::AwaitHello) {
          if (now - p->opened_at > kHelloTimeoutMs) stale.push_back(p);
          continue;
        }
        if (p->st.phase != wire::ConnPhase::Active) continue;
        const auto checked = wire::check_liveness(p->st, now, hub.config_.heartbeat_timeout_ms);
        if (checked.phase == wire::ConnPhase::Closed) {
          p->timed_out = true;
          stale.push_back(p);
          continue;
        }
        p->conn->send(wire::encode(wire::stamp_outbound(p->st, wire::HeartbeatMsg{}, now)));
      }
      for (auto& p : stale) p->conn->close();
      for (auto it = udp_peers.begin(); it != udp_peers.end();) {
        const auto checked =
            wire::check_liveness(it->second.st, now, hub.config_.heartbeat_timeout_ms);
        if (it->second.st.phase == wire::ConnPhase::Active &&
            checked.phase == wire::ConnPhase::Closed) {
          queue.push(ClosedCmd{std::string(wire::to_string(wire::DeviceType::Mocap)), false, now});
          it = udp_peers.erase(it);
        } else {
          ++it;
        }
      }
      heartbeat_tick();
    });
  }

  void shutdown_io() {
    io_stopping = true;
    for (auto& a : acceptors) {
      boost::system::error_code ignored;
      a->close(ignored);
    }
    if (udp_socket) {
      boost::system::error_code ignored;
      udp_socket->close(ignored);
    }
    if (heartbeat) heartbeat->cancel();
    if (api) api->stop();
    for (auto& [id, p] : peers) {
      if (p->st.phase == wire::ConnPhase::Active)
        p->conn->send(wire::encode(
            wire::stamp_outbound(p->st, wire::ByeMsg{"session ended"}, wall_clock_ms())));
      p->conn->close();
    }
    work.reset();
    // Idle keep-alive HTTP readers would hold the loop open; give queued
    // BYEs a moment, then stop.
    heartbeat = std::make_unique<asio::steady_timer>(io, std::chrono::milliseconds(200));
    heartbeat->async_wait([this](const boost::system::error_code&) { io.stop(); });
  }
};

Hub::Hub(runtime::HubConfig config) : config_(std::move(config)) {
  impl_ = std::make_unique<Impl>(*this);
}

Hub::~Hub() { stop(); }

void Hub::start() {
  if (impl_->started.exchange(true)) return;
  Impl& m = *impl_;
  const TimeMs start = wall_clock_ms();
  session_id_ = config_.session_id.empty() ? "session-" + std::to_string(start) : config_.session_id;

  runtime::EngineConfig ec;
  ec.session_id = session_id_;
  if (config_.plan_file) ec.plan = cam::load_plan(*config_.plan_file);
  if (config_.rules_file) ec.rules = cam::load_rule_config(*config_.rules_file);

  const auto address = asio::ip::make_address(config_.bind_address);
  const std::uint16_t tcp_ports[3] = {config_.port_ecg, config_.port_ppg, config_.port_game};
  for (int i = 0; i < 3; ++i) {
    auto a = std::make_unique<asio::ip::tcp::acceptor>(m.io);
    asio::ip::tcp::endpoint ep(address, tcp_ports[i]);
    a->open(ep.protocol());
    a->set_option(asio::socket_base::reuse_address(true));
    a->bind(ep);
    a->listen();
    ports_[i] = a->local_endpoint().port();
    m.acceptors.push_back(std::move(a));
  }
  m.udp_socket = std::make_unique<udp::socket>(m.io, udp::endpoint(address, config_.port_skel));
  ports_[3] = m.udp_socket->local_endpoint().port();
  m.api = std::make_unique<ApiServer>(m.io, *this, config_.bind_address, config_.http_port);
  m.api->start();
  ports_[4] = m.api->port();

  if (config_.record) {
    std::filesystem::create_directories(session_dir());
    m.recorder = std::make_unique<iam::Recorder>(
        std::make_unique<iam::FileStorage>(session_dir()),
        [&m](const Error&) { m.storage_failed = true; });
  }
  m.engine = std::make_unique<runtime::Engine>(std::move(ec), start, m.recorder.get());
  m.install_hooks();
  m.io_directive = m.engine->current_directive();
  m.engine->start();
  if (m.recorder) iam::write_session_meta(session_dir(), m.engine->meta());
  m.publish();

  m.work.emplace(m.io.get_executor());
  for (int i = 0; i < 3; ++i) m.accept(i);
  m.receive_udp();
  m.heartbeat = std::make_unique<asio::steady_timer>(m.io);
  m.heartbeat_tick();

  m.io_thread = std::thread([&m] { m.io.run(); });
  m.engine_thread = std::thread([&m] { m.engine_loop(); });
}

void Hub::stop() {
  Impl& m = *impl_;
  if (!m.started.load() || m.stopping.exchange(true)) return;
  m.queue.close();
  if (m.engine_thread.joinable()) m.engine_thread.join();
  asio::post(m.io, [&m] { m.shutdown_io(); });
  if (m.io_thread.joinable()) m.io_thread.join();
  {
    std::lock_guard lock(m.subs_mutex);
    m.subs.clear();
  }
}

std::shared_ptr<const Snapshot> Hub::snapshot() const {
  std::lock_guard lock(impl_->snap_mutex);
  return impl_->snap;
}

void Hub::submit_override(iam::OverrideCommand cmd, ReplyFn reply) {
  impl_->queue.push(OverrideCmd{std::move(cmd), std::make_shared<PendingReply>(std::move(reply))});
}

void Hub::submit_plan(cam::TherapyPlan plan, ReplyFn reply) {
  impl_->queue.push(PlanCmd{std::move(plan), std::make_shared<PendingReply>(std::move(reply))});
}

void Hub::submit_ack(std::uint64_t id, ReplyFn reply) {
  impl_->queue.push(AckCmd{id, std::make_shared<PendingReply>(std::move(reply))});
}

namespace {
template <class Submit>
CommandReply wait_reply(Submit&& submit) {
  auto promise = std::make_shared<std::promise<CommandReply>>();
  auto fut = promise->get_future();
  submit([promise](CommandReply r) { promise->set_value(std::move(r)); });
  if (fut.wait_for(std::chrono::seconds(5)) != std::future_status::ready)
    return {503, {{"error", "engine did not answer"}}};
  return fut.get();
}
}  // namespace

CommandReply Hub::apply_override(iam::OverrideCommand cmd) {
  if (impl_->stopping.load()) return {409, {{"error", "NoActiveSession"}}};
  return wait_reply([&](ReplyFn f) { submit_override(std::move(cmd), std::move(f)); });
}

CommandReply Hub::set_plan(cam::TherapyPlan plan) {
  if (impl_->stopping.load()) return {409, {{"error", "NoActiveSession"}}};
  return wait_reply([&](ReplyFn f) { submit_plan(std::move(plan), std::move(f)); });
}

CommandReply Hub::acknowledge_alert(std::uint64_t id) {
  if (impl_->stopping.load()) return {409, {{"error", "NoActiveSession"}}};
  return wait_reply([&](ReplyFn f) { submit_ack(id, std::move(f)); });
}

std::shared_ptr<Subscription> Hub::subscribe(std::function<void()> wake) {
  auto s = std::make_shared<Subscription>(std::max<std::size_t>(1, config_.ws_buffer),
                                          std::move(wake));
  std::lock_guard lock(impl_->subs_mutex);
  impl_->subs.push_back(s);
  return s;
}

void Hub::unsubscribe(const std::shared_ptr<Subscription>& s) {
  std::lock_guard lock(impl_->subs_mutex);
  auto& v = impl_->subs;
  v.erase(std::remove(v.begin(), v.end(), s), v.end());
  counters_.ws_dropped += s->dropped();
}

LatencyStats Hub::latency() const {
  std::vector<double> v;
  {
    std::lock_guard lock(impl_->lat_mutex);
    v = impl_->latencies;
  }
  LatencyStats st;
  st.count = v.size();
  if (v.empty()) return st;
  std::sort(v.begin(), v.end());
  auto rank = [&](double q) {
    const auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    return v[std::min(i, v.size() - 1)];
  };
  st.p50_ms = rank(0.50);
  st.p95_ms = rank(0.95);
  st.max_ms = v.back();
  return st;
}

json Hub::metrics() const {
  const LatencyStats l = latency();
  std::uint64_t ws_dropped = counters_.ws_dropped.load();
  {
    std::lock_guard lock(impl_->subs_mutex);
    for (const auto& s : impl_->subs) ws_dropped += s->dropped();
  }
  return {{"session_id", session_id_},
          {"latency_ms", {{"count", l.count}, {"p50", l.p50_ms}, {"p95", l.p95_ms}, {"max", l.max_ms}}},
          {"connections", counters_.connections.load()},
          {"malformed", counters_.malformed.load()},
          {"violations", counters_.violations.load()},
          {"rejected_packets", counters_.rejected_packets.load()},
          {"samples", counters_.samples.load()},
          {"reports", counters_.reports.load()},
          {"directives_sent", counters_.directives_sent.load()},
          {"queue_dropped", impl_->queue.dropped()},
          {"ws_dropped", ws_dropped}};
}

namespace {

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

json session_summary(const std::filesystem::path& dir) {
  const json meta = iam::read_session_meta(dir);
  if (meta.is_null()) throw Error(Errc::CorruptLog, dir.string(), "no session metadata");
  json counts = json::object();
  for (auto s : {LogStream::Raw, LogStream::Fused, LogStream::States, LogStream::Directives,
                 LogStream::Reports, LogStream::Alerts, LogStream::Overrides}) {
    std::string name(file_name(s));
    counts[name.substr(0, name.find('.'))] = count_lines(dir / std::string(file_name(s)));
  }
  std::size_t n_reports = 0;
  double success = 0.0;
  json cats = json::object();
  {
    std::ifstream in(dir / std::string(file_name(LogStream::Reports)));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json r = json::parse(line, nullptr, false);
      if (r.is_discarded()) continue;
      ++n_reports;
      success += r.value("success_rate", 0.0);
      if (!r.value("incomplete", false)) {
        const std::string c = r.value("category", "");
        cats[c] = cats.value(c, 0) + 1;
      }
    }
  }
  json alerts = json::array();
  {
    std::ifstream in(dir / std::string(file_name(LogStream::Alerts)));
    std::string line;
    while (std::getline(in, line)) {
      const json a = json::parse(line, nullptr, false);
      if (!a.is_discarded() && !line.empty()) alerts.push_back(a);
    }
  }
  auto last_line = [&](LogStream s) -> json {
    std::ifstream in(dir / std::string(file_name(s)));
    std::string line, last;
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    if (last.empty()) return nullptr;
    const json j = json::parse(last, nullptr, false);
    return j.is_discarded() ? json(nullptr) : j;
  };
  return {{"session_id", meta.value("session_id", dir.filename().string())},
          {"started_at", meta.value("started_at", json(nullptr))},
          {"ended_at", meta.value("ended_at", json(nullptr))},
          {"live", false},
          {"directives", counts["directives"]},
          {"counts", counts},
          {"category_counts", cats},
          {"reports", {{"count", n_reports},
                       {"mean_success", n_reports ? json(success / n_reports) : json(nullptr)}}},
          {"alerts", alerts},
          {"plan", meta.value("plan", json(nullptr))},
          {"last_directive", last_line(LogStream::Directives)},
          {"last_state", last_line(LogStream::States)}};
}

json list_sessions(const std::filesystem::path& sessions_dir) {
  json out = json::array();
  std::error_code ec;
  if (!std::filesystem::is_directory(sessions_dir, ec)) return out;
  std::vector<json> found;
  for (const auto& entry : std::filesystem::directory_iterator(sessions_dir, ec)) {
    if (!entry.is_directory()) continue;
    json meta;
    try {
      meta = iam::read_session_meta(entry.path());
    } catch (const Error&) {
      continue;
    }
    if (meta.is_null()) continue;
    found.push_back({{"session_id", meta.value("session_id", entry.path().filename().string())},
                     {"started_at", meta.value("started_at", json(nullptr))},
                     {"ended_at", meta.value("ended_at", json(nullptr))}});
  }
  std::sort(found.begin(), found.end(), [](const json& a, const json& b) {
    return a.value("started_at", TimeMs{0}) < b.value("started_at", TimeMs{0});
  });
  for (auto& f : found) out.push_back(std::move(f));
  return out;
}

}  // namespace blexer::net
