#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/cam/inference.hpp"
#include "blexer/cam/rules.hpp"
#include "blexer/common/event_log.hpp"
#include "blexer/fusion/aligner.hpp"
#include "blexer/fusion/features.hpp"
#include "blexer/iam/alerts.hpp"
#include "blexer/iam/types.hpp"
#include "blexer/ingest/baseline.hpp"
#include "blexer/ingest/samples.hpp"
#include "blexer/ipm/report.hpp"

namespace blexer::runtime {

struct EngineConfig {
  std::string session_id = "session";
  cam::TherapyPlan plan;
  cam::RuleConfig rules;
  fusion::FeatureOptions features;
  iam::AlertOptions alerts;
};

struct EngineHooks {
  std::function<void(const fusion::FusedFrame&)> frame;
  std::function<void(const cam::UserState&)> state;
  std::function<void(const cam::Directive&)> directive;
  std::function<void(const iam::Alert&)> alert;
  std::function<void(const ipm::PerformanceReport&)> report;
};

inline constexpr TimeMs kDecisionPeriodMs = 1000;

// The session pipeline on a logical clock: fusion every 100 ms, inference
// and rules every second. Every input is logged with a global `ord` and the
// logical time `at` it was applied at, so replaying the logs in ord order
// with advance_to(at) before each input reproduces the run exactly.
//
// Not thread-safe; exactly one thread drives an engine.
class Engine {
 public:
  Engine(EngineConfig config, TimeMs start, EventSink* sink = nullptr, EngineHooks hooks = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void set_hooks(EngineHooks hooks) { hooks_ = std::move(hooks); }
  void set_sink(EventSink* sink) { sink_ = sink; }

  // Emits the initial directive. Call once, after hooks are installed.
  void start();

  // Runs every tick due at or before t.
  void advance_to(TimeMs t);
  TimeMs now() const { return now_; }

  void ingest(const ingest::Sample& sample);
  void on_report(const ipm::PerformanceReport& report, TimeMs hub_ts);
  // Throws Error{NoActiveSession} or Error{InvalidOverride}.
  cam::Directive apply_override(const iam::OverrideCommand& cmd, TimeMs hub_ts);
  // Throws Error{InvalidConfig}.
  void set_plan(const cam::TherapyPlan& plan, TimeMs hub_ts);
  void set_rules(const cam::RuleConfig& rules, TimeMs hub_ts);

  void connection_closed(const std::string& device, bool expected, TimeMs t);
  void data_quality(const std::string& detail, iam::Severity severity, TimeMs t);
  bool acknowledge_alert(std::uint64_t id);

  void close(TimeMs t);
  bool active() const { return started_ && !closed_; }

  const EngineConfig& config() const { return config_; }
  TimeMs start_time() const { return start_; }
  const cam::Directive& current_directive() const { return current_; }
  const std::optional<cam::UserState>& last_state() const { return state_; }
  const std::optional<fusion::FusedFrame>& last_frame() const { return frame_; }
  const std::optional<fusion::FeatureWindow>& last_features() const { return features_; }
  const cam::ContextRecord& context() const { return ctx_; }
  const cam::DecisionMemory& memory() const { return policy_.memory_view(); }
  const ingest::Baseline& baseline() const { return baseline_.current(); }
  const std::vector<iam::Alert>& alerts() const { return alerts_.history(); }
  std::size_t directives_emitted() const { return emitted_; }
  std::uint64_t inputs() const { return ord_; }

  // FNV-1a over the decision-relevant state; equal before and after any
  // read-only observation.
  std::uint64_t state_hash() const;
  // Session id, start time and the plan and rules the session started with.
  nlohmann::json meta() const;

 private:
  class Policy final : public cam::DecisionPolicy {
   public:
    explicit Policy(const cam::RuleConfig* config) : config_(config) {}
    cam::Directive decide(const cam::UserState& s, const cam::ContextRecord& ctx,
                          const cam::Directive& current, TimeMs now) override {
      return cam::decide(s, ctx, current, memory_, *config_, now);
    }
    cam::DecisionMemory& memory() override { return memory_; }
    const cam::DecisionMemory& memory_view() const { return memory_; }

   private:
    const cam::RuleConfig* config_;
    cam::DecisionMemory memory_;
  };

  TimeMs enter(TimeMs hub_ts);
  void log_input(LogStream stream, nlohmann::json record, TimeMs at);
  void fusion_tick(TimeMs t);
  void decision_tick(TimeMs t);
  void emit_directive(const cam::Directive& d);
  void emit_alert(const iam::Alert& a);
  void require_active() const;

  EngineConfig config_;
  const cam::TherapyPlan initial_plan_;
  const cam::RuleConfig initial_rules_;
  TimeMs start_;
  EventSink* sink_;
  EngineHooks hooks_;

  TimeMs now_;
  TimeMs next_tick_;
  std::uint64_t ord_ = 0;
  std::size_t emitted_ = 0;
  bool started_ = false;
  bool closed_ = false;
  bool seen_ecg_ = false;

  fusion::Aligner aligner_;
  fusion::FrameHistory history_;
  ingest::BaselineTracker baseline_;
  cam::HeuristicInference inference_;
  Policy policy_;
  cam::ContextRecord ctx_;
  iam::AlertEvaluator alerts_;
  cam::Directive current_;
  std::optional<cam::UserState> state_;
  std::optional<fusion::FusedFrame> frame_;
  std::optional<fusion::FeatureWindow> features_;
};

// Directive JSON as logged, and the hash used to compare directive sequences.
nlohmann::json directive_record(const cam::Directive& d);
std::uint64_t directive_sequence_hash(const std::vector<cam::Directive>& directives);

}  // namespace blexer::runtime
