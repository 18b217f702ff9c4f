#include "blexer/runtime/engine.hpp"

#include <ctime>

#include "blexer/cam/config_io.hpp"
#include "blexer/common/error.hpp"
#include "blexer/common/hash.hpp"
#include "blexer/iam/overrides.hpp"
#include "blexer/ingest/session.hpp"
#include "blexer/wire/payload_json.hpp"

namespace blexer::runtime {

using nlohmann::json;

namespace {

cam::TimeOfDay time_of_day_at(TimeMs t) {
  const std::time_t secs = static_cast<std::time_t>(t / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return cam::time_of_day_from_hour(tm.tm_hour);
}

bool has_rule(const cam::Directive& d, const char* id) {
  for (const auto& r : d.rationale)
    if (r == id) return true;
  return false;
}

}  // namespace

json directive_record(const cam::Directive& d) { return wire::to_json(d); }

std::uint64_t directive_sequence_hash(const std::vector<cam::Directive>& directives) {
  Fnv1a h;
  for (const auto& d : directives) {
    h.update(directive_record(d).dump());
    h.update("\n");
  }
  return h.digest();
}

Engine::Engine(EngineConfig config, TimeMs start, EventSink* sink, EngineHooks hooks)
    : config_(std::move(config)),
      initial_plan_(config_.plan),
      initial_rules_(config_.rules),
      start_(start),
      sink_(sink),
      hooks_(std::move(hooks)),
      now_(start),
      next_tick_((start / fusion::kFramePeriodMs + 1) * fusion::kFramePeriodMs),
      history_(config_.features),
      inference_(config_.rules),
      policy_(&config_.rules),
      alerts_(config_.alerts) {
  cam::validate(config_.plan);
  cam::validate(config_.rules);
  ctx_.plan = config_.plan;
  ctx_.time_of_day = time_of_day_at(start);
  current_ = cam::initial_directive(config_.plan, config_.rules, start);
}

void Engine::start() {
  if (started_) return;
  started_ = true;
  emit_directive(current_);
}

void Engine::require_active() const {
  if (!active()) throw Error(Errc::NoActiveSession, config_.session_id, "session is not running");
}

TimeMs Engine::enter(TimeMs hub_ts) {
  const TimeMs at = std::max(hub_ts, now_);
  advance_to(at);
  return at;
}

void Engine::log_input(LogStream stream, json record, TimeMs at) {
  record["ord"] = ord_++;
  record["at"] = at;
  if (sink_) sink_->append(stream, record);
}

void Engine::advance_to(TimeMs t) {
  if (closed_) return;
  while (next_tick_ <= t) {
    const TimeMs tick = next_tick_;
    next_tick_ += fusion::kFramePeriodMs;
    fusion_tick(tick);
    if (started_ && tick % kDecisionPeriodMs == 0) decision_tick(tick);
  }
  if (t > now_) now_ = t;
}

void Engine::ingest(const ingest::Sample& sample) {
  require_active();
  const TimeMs at = enter(ingest::hub_ts_of(sample));
  log_input(LogStream::Raw, ingest::sample_to_json(sample), at);

  if (const auto* e = std::get_if<ingest::EcgSample>(&sample)) {
    seen_ecg_ = true;
    baseline_.update(e->bpm, e->hub_ts);
  } else if (const auto* p = std::get_if<ingest::PpgSample>(&sample)) {
    if (!seen_ecg_ && p->confidence >= config_.features.ppg_confidence_gate)
      baseline_.update(p->bpm, p->hub_ts);
  }
  aligner_.ingest(sample);
}

void Engine::on_report(const ipm::PerformanceReport& report, TimeMs hub_ts) {
  require_active();
  const TimeMs at = enter(hub_ts);
  log_input(LogStream::Reports, wire::to_json(report), at);
  ctx_.add_report(report);
  if (!report.incomplete) ++ctx_.category_counts[report.category];
  if (hooks_.report) hooks_.report(report);
}

cam::Directive Engine::apply_override(const iam::OverrideCommand& cmd, TimeMs hub_ts) {
  require_active();
  iam::validate_override(cmd, policy_.memory().paused);
  const TimeMs at = enter(hub_ts);
  json record = {{"type", "override"}, {"command", wire::to_json(cmd)}};
  log_input(LogStream::Overrides, record, at);
  const cam::UserState last = state_.value_or(cam::UserState{});
  cam::Directive d = iam::synthesize_override(cmd, current_, last, ctx_.plan, config_.rules,
                                              policy_.memory(), at);
  emit_directive(d);
  return d;
}

void Engine::set_plan(const cam::TherapyPlan& plan, TimeMs hub_ts) {
  require_active();
  cam::validate(plan);
  const TimeMs at = enter(hub_ts);
  log_input(LogStream::Overrides, {{"type", "plan"}, {"plan", cam::to_json(plan)}}, at);
  config_.plan = plan;
  ctx_.plan = plan;
}

void Engine::set_rules(const cam::RuleConfig& rules, TimeMs hub_ts) {
  require_active();
  cam::validate(rules);
  const TimeMs at = enter(hub_ts);
  log_input(LogStream::Overrides, {{"type", "rules"}, {"rules", cam::to_json(rules)}}, at);
  config_.rules = rules;
  inference_.set_config(rules);
}

void Engine::connection_closed(const std::string& device, bool expected, TimeMs t) {
  if (auto a = alerts_.connection_closed(device, expected || closed_, t)) emit_alert(*a);
}

void Engine::data_quality(const std::string& detail, iam::Severity severity, TimeMs t) {
  emit_alert(alerts_.data_quality(detail, severity, t));
}

bool Engine::acknowledge_alert(std::uint64_t id) { return alerts_.acknowledge(id); }

void Engine::close(TimeMs t) {
  if (closed_) return;
  advance_to(t);
  closed_ = true;
}

void Engine::fusion_tick(TimeMs t) {
  fusion::FusedFrame frame = aligner_.tick(t);
  history_.push(frame);
  if (sink_) sink_->append(LogStream::Fused, fusion::to_json(frame));
  frame_ = std::move(frame);
  if (hooks_.frame) hooks_.frame(*frame_);
}

void Engine::decision_tick(TimeMs t) {
  baseline_.tick(t);
  try {
    features_ = history_.extract();
  } catch (const Error& e) {
    if (e.code() != Errc::NoUsableData) throw;
    features_.reset();
  }

  cam::InferenceInputs in;
  in.features = features_ ? &*features_ : nullptr;
  in.baseline = baseline_.current();
  in.recent_success = ctx_.recent_success(config_.rules.report_window);
  in.difficulty = current_.difficulty_target;
  in.now = t;
  const cam::UserState* previous = state_ ? &*state_ : nullptr;
  cam::UserState s = inference_.infer(in, previous);
  state_ = s;
  if (sink_) sink_->append(LogStream::States, cam::to_json(s));
  if (hooks_.state) hooks_.state(s);

  if (auto a = alerts_.evaluate(s, ctx_.plan.fatigue_threshold)) emit_alert(*a);

  cam::Directive d = policy_.decide(s, ctx_, current_, t);
  if (!d.same_action(current_) || has_rule(d, cam::kRuleSafety)) emit_directive(d);
}

void Engine::emit_directive(const cam::Directive& d) {
  cam::validate_directive(d, emitted_ == 0 ? std::nullopt
                                           : std::optional<int>(current_.difficulty_target));
  current_ = d;
  ++emitted_;
  if (sink_) sink_->append(LogStream::Directives, directive_record(d));
  if (hooks_.directive) hooks_.directive(d);
}

void Engine::emit_alert(const iam::Alert& a) {
  if (sink_) sink_->append(LogStream::Alerts, wire::to_json(a));
  if (hooks_.alert) hooks_.alert(a);
}

std::uint64_t Engine::state_hash() const {
  const auto& m = policy_.memory_view();
  json j;
  j["directive"] = directive_record(current_);
  if (state_) {
    // Time stamps are left out: a carried state is the same state.
    j["state"] = {state_->workload, state_->engagement, state_->fatigue, state_->confidence};
  }
  j["plan"] = cam::to_json(ctx_.plan);
  json counts = json::object();
  for (const auto& [c, n] : ctx_.category_counts) counts[std::string(to_string(c))] = n;
  j["counts"] = counts;
  json reports = json::array();
  for (const auto& r : ctx_.recent_reports) reports.push_back(wire::to_json(r));
  j["reports"] = reports;
  j["memory"] = {{"last_change", m.last_difficulty_change.value_or(-1)},
                 {"low_since", m.low_engagement_since.value_or(-1)},
                 {"override_until", m.override_until.value_or(-1)},
                 {"paused", m.paused}};
  json alerts = json::array();
  for (const auto& a : alerts_.history()) alerts.push_back(wire::to_json(a));
  j["alerts"] = alerts;
  j["inputs"] = ord_;
  return fnv1a64(j.dump());
}

json Engine::meta() const {
  return {{"session_id", config_.session_id},
          {"started_at", start_},
          {"plan", cam::to_json(initial_plan_)},
          {"rules", cam::to_json(initial_rules_)}};
}

}  // namespace blexer::runtime
