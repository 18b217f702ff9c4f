#include "blexer/simkit/closed_loop.hpp"

#include <algorithm>
#include <deque>
#include <memory>

#include "blexer/common/error.hpp"
#include "blexer/iam/recorder.hpp"
#include "blexer/ingest/session.hpp"
#include "blexer/ipm/pcg.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/simkit/physiology.hpp"
#include "blexer/simkit/player_driver.hpp"
#include "blexer/simkit/stream_gen.hpp"
#include "blexer/wire/codec.hpp"

namespace blexer::simkit {

namespace {

constexpr TimeMs kStepMs = 100;

// Random operator traffic for robustness runs.
std::optional<iam::OverrideCommand> random_override(Rng& rng, bool paused, TimeMs t) {
  iam::OverrideCommand c;
  c.issued_by = "fuzz";
  c.t = t;
  if (paused) {
    c.kind = iam::OverrideKind::Resume;
    return c;
  }
  const auto pick = rng.uniform_below(10);
  if (pick < 6) {
    c.kind = iam::OverrideKind::SetDifficulty;
    c.level = static_cast<int>(1 + rng.uniform_below(10));
  } else if (pick < 7) {
    c.kind = iam::OverrideKind::ForceRest;
  } else if (pick < 9) {
    c.kind = iam::OverrideKind::SwitchCategory;
    c.category = cam::kAllCategories[rng.uniform_below(3)];
  } else {
    c.kind = iam::OverrideKind::Pause;
  }
  return c;
}

}  // namespace

SimResult run_simulation(const SimOptions& o) {
  SimResult result;
  runtime::EngineConfig config;
  config.session_id = o.session_id;
  config.plan = o.plan;
  config.rules = o.rules;
  runtime::Engine engine(config, o.start_ms, o.sink);

  std::deque<std::string> to_game;  // encoded DIRECTIVE lines
  std::optional<int> last_difficulty;
  runtime::EngineHooks hooks;
  hooks.directive = [&](const cam::Directive& d) {
    EmittedDirective e;
    e.directive = d;
    e.previous_difficulty = last_difficulty;
    if (engine.last_state()) {
      e.had_state = true;
      e.fatigue = engine.last_state()->fatigue;
    }
    result.directives.push_back(e);
    last_difficulty = d.difficulty_target;
    to_game.push_back(wire::encode(wire::Envelope{result.directives.size(), d.issued_at, d}));
  };
  hooks.alert = [&](const iam::Alert& a) { result.alerts.push_back(a); };
  engine.set_hooks(hooks);
  engine.start();

  ingest::SensorSession ecg(o.session_id, wire::DeviceType::EcgChest);
  ingest::SensorSession ppg(o.session_id, wire::DeviceType::PpgWrist);
  ingest::SensorSession skel(o.session_id, wire::DeviceType::Mocap);
  auto session_for = [&](wire::DeviceType d) -> ingest::SensorSession& {
    if (d == wire::DeviceType::EcgChest) return ecg;
    if (d == wire::DeviceType::PpgWrist) return ppg;
    return skel;
  };
  auto deliver = [&](ingest::SensorSession& s, const wire::Envelope& env, TimeMs t) {
    // Through the wire codec, as a device would send it.
    const wire::Envelope decoded = wire::decode(wire::encode(env));
    try {
      for (const auto& sample : s.accept_packet(decoded, t)) engine.ingest(sample);
    } catch (const Error& e) {
      if (e.code() != Errc::StaleTimestamp) throw;
    }
  };

  std::vector<TimedEnvelope> scripted;
  std::size_t scripted_next = 0;
  if (o.scenario) {
    StreamOptions so;
    so.start_ms = o.start_ms;
    so.control = false;
    so.joints = false;
    scripted = generate_stream(*o.scenario, so);
  }
  SignalSynth synth(o.seed);
  std::uint64_t sensor_seq = 1;

  ipm::ControllerOptions copts;
  copts.preference = o.plan.preferences;
  copts.excluded = o.plan.excluded_exercises;
  copts.bands = {o.rules.success_high, o.rules.success_low};
  if (o.use_sequence) copts.sequence = ipm::pcg_sequence(o.plan, o.catalog, o.seed);
  PlayerDriver driver(o.catalog, copts, o.player, o.seed);
  const ipm::PlayController& game = driver.game();

  Rng override_rng(o.seed ^ 0x5851f42d4c957f2dULL);
  std::uint64_t report_seq = 1;
  std::vector<OverrideEvent> scheduled = o.overrides;
  std::stable_sort(scheduled.begin(), scheduled.end(),
                   [](const OverrideEvent& a, const OverrideEvent& b) { return a.at < b.at; });
  std::size_t scheduled_next = 0;

  const TimeMs end = o.start_ms + o.duration_ms;
  for (TimeMs t = o.start_ms + kStepMs; t <= end; t += kStepMs) {
    // Sensors.
    if (o.scenario) {
      while (scripted_next < scripted.size() && scripted[scripted_next].t <= t) {
        const auto& e = scripted[scripted_next++];
        if (wire::is_data(e.env.type())) deliver(session_for(e.device), e.env, t);
      }
    } else {
      const PhysioTargets targets = targets_for_fatigue(driver.player().fatigue_acc, o.resting_bpm);
      if (t % kEcgPeriodMs == 0) {
        deliver(ecg, {sensor_seq, t, synth.ecg(targets, kEcgPeriodMs)}, t);
        deliver(ppg, {sensor_seq, t, synth.ppg(targets)}, t);
        ++sensor_seq;
      }
      if (t % kAffectPeriodMs == 0)
        deliver(skel, {static_cast<std::uint64_t>(t / kAffectPeriodMs), t, synth.affect(targets, t, false)}, t);
    }

    engine.advance_to(t);

    // Operator.
    while (scheduled_next < scheduled.size() && scheduled[scheduled_next].at <= t) {
      try {
        engine.apply_override(scheduled[scheduled_next].command, t);
      } catch (const Error& e) {
        if (e.code() != Errc::InvalidOverride) throw;
      }
      ++scheduled_next;
    }
    if (o.random_overrides_per_min > 0.0 && t % 1000 == 0 &&
        override_rng.bernoulli(o.random_overrides_per_min / 60.0)) {
      if (auto cmd = random_override(override_rng, engine.memory().paused, t))
        engine.apply_override(*cmd, t);
    }

    // Game side.
    while (!to_game.empty()) {
      const wire::Envelope env = wire::decode(to_game.front());
      to_game.pop_front();
      const auto& d = std::get<cam::Directive>(env.payload);
      result.received.push_back(d);
      driver.on_directive(d, t);
    }
    for (const auto& r : driver.step(t, kStepMs)) {
      const wire::Envelope env =
          wire::decode(wire::encode(wire::Envelope{report_seq++, t, r}));
      const auto& decoded = std::get<ipm::PerformanceReport>(env.payload);
      result.reports.push_back(decoded);
      engine.on_report(decoded, t);
    }

    if (t % runtime::kDecisionPeriodMs == 0 && engine.last_state()) {
      TickRecord rec;
      rec.t = t;
      rec.state = *engine.last_state();
      rec.player_fatigue = driver.player().fatigue_acc;
      rec.difficulty_target = engine.current_directive().difficulty_target;
      rec.play_level = game.state().difficulty;
      rec.phase = game.state().phase;
      rec.rolling_success = engine.context().recent_success(3);
      result.ticks.push_back(rec);
    }
  }

  engine.close(end);
  driver.finish(end);
  std::vector<cam::Directive> ds;
  ds.reserve(result.directives.size());
  for (const auto& e : result.directives) ds.push_back(e.directive);
  result.directive_hash = runtime::directive_sequence_hash(ds);
  result.meta = engine.meta();
  result.meta["ended_at"] = end;
  result.ended_at = end;
  return result;
}

SimResult record_simulation(SimOptions options, const std::filesystem::path& dir) {
  auto recorder = std::make_unique<iam::Recorder>(std::make_unique<iam::FileStorage>(dir));
  options.sink = recorder.get();
  SimResult r = run_simulation(options);
  recorder->flush();
  recorder.reset();
  iam::write_session_meta(dir, r.meta);
  return r;
}

}  // namespace blexer::simkit
