#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/cam/types.hpp"
#include "blexer/fusion/frame.hpp"
#include "blexer/iam/types.hpp"
#include "blexer/runtime/config.hpp"

namespace blexer::net {

// What the API reads. Published by the engine thread after every batch of
// work; readers never touch the engine.
struct Snapshot {
  std::string session_id;
  TimeMs started_at = 0;
  TimeMs now = 0;
  bool active = false;
  std::optional<cam::UserState> state;
  std::optional<fusion::FusedFrame> frame;
  cam::Directive directive;
  cam::TherapyPlan plan;
  cam::RuleConfig rules;
  std::vector<iam::Alert> alerts;
  nlohmann::json summary;
  std::uint64_t state_hash = 0;
};

struct LatencyStats {
  std::size_t count = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

struct HubCounters {
  std::atomic<std::uint64_t> connections{0};
  std::atomic<std::uint64_t> malformed{0};
  std::atomic<std::uint64_t> violations{0};
  std::atomic<std::uint64_t> rejected_packets{0};
  std::atomic<std::uint64_t> samples{0};
  std::atomic<std::uint64_t> reports{0};
  std::atomic<std::uint64_t> directives_sent{0};
  std::atomic<std::uint64_t> ws_dropped{0};
};

// Result of a command handled by the engine thread. `status` follows HTTP:
// 200 ok, 400 invalid, 404 unknown, 409 no session, 503 dropped.
struct CommandReply {
  int status = 200;
  nlohmann::json body;
};
using ReplyFn = std::function<void(CommandReply)>;

// A lossy subscriber to live events. push() never blocks; a full buffer
// drops its oldest event.
class Subscription {
 public:
  Subscription(std::size_t capacity, std::function<void()> wake)
      : capacity_(capacity), wake_(std::move(wake)) {}

  void push(std::shared_ptr<const std::string> event);
  std::vector<std::shared_ptr<const std::string>> take();
  std::uint64_t dropped() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::shared_ptr<const std::string>> items_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
  bool waiting_ = true;  // consumer idle until woken
  std::function<void()> wake_;
};

class ApiServer;

// The live session: sensor listeners, the GAME link, the engine loop and the
// HTTP/WebSocket API. Ports configured as 0 bind ephemeral ports.
class Hub {
 public:
  explicit Hub(runtime::HubConfig config);
  ~Hub();
  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  // Binds every listener and starts the session. Throws on bind failure or
  // invalid plan/rules files.
  void start();
  // Ends the session, writes the session metadata and joins the threads.
  void stop();

  std::uint16_t port_ecg() const { return ports_[0]; }
  std::uint16_t port_ppg() const { return ports_[1]; }
  std::uint16_t port_game() const { return ports_[2]; }
  std::uint16_t port_skel() const { return ports_[3]; }
  std::uint16_t http_port() const { return ports_[4]; }

  const runtime::HubConfig& config() const { return config_; }
  const std::string& session_id() const { return session_id_; }
  std::filesystem::path session_dir() const { return config_.sessions_dir / session_id_; }

  std::shared_ptr<const Snapshot> snapshot() const;

  // Mutations run on the engine thread; `reply` is called from there.
  void submit_override(iam::OverrideCommand cmd, ReplyFn reply);
  void submit_plan(cam::TherapyPlan plan, ReplyFn reply);
  void submit_ack(std::uint64_t alert_id, ReplyFn reply);
  // Blocking forms of the above.
  CommandReply apply_override(iam::OverrideCommand cmd);
  CommandReply set_plan(cam::TherapyPlan plan);
  CommandReply acknowledge_alert(std::uint64_t alert_id);

  std::shared_ptr<Subscription> subscribe(std::function<void()> wake);
  void unsubscribe(const std::shared_ptr<Subscription>& s);

  LatencyStats latency() const;
  const HubCounters& counters() const { return counters_; }
  nlohmann::json metrics() const;

 private:
  struct Impl;
  friend class ApiServer;

  runtime::HubConfig config_;
  std::string session_id_;
  std::uint16_t ports_[5] = {};
  HubCounters counters_;
  std::unique_ptr<Impl> impl_;
};

// Summary of a recorded session directory: metadata, per-stream record
// counts, reports and alerts.
nlohmann::json session_summary(const std::filesystem::path& dir);
// Sessions found under `sessions_dir` (directories holding session.json).
nlohmann::json list_sessions(const std::filesystem::path& sessions_dir);

}  // namespace blexer::net
