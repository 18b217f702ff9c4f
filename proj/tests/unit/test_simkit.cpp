#include <doctest.h>

#include <cmath>
#include <fstream>

#include "blexer/common/error.hpp"
#include "blexer/fusion/hrv.hpp"
#include "blexer/ingest/rr.hpp"
#include "blexer/simkit/closed_loop.hpp"
#include "blexer/simkit/physiology.hpp"
#include "blexer/simkit/player.hpp"
#include "blexer/simkit/replay.hpp"
#include "blexer/simkit/scenario.hpp"
#include "blexer/simkit/stream_gen.hpp"
#include "feed.hpp"
#include "tmpdir.hpp"

using namespace blexer;
using namespace blexer::simkit;

TEST_CASE("player success probability") {
  PlayerModel m;
  m.skill = 5;
  CHECK(success_probability(m, 5) == doctest::Approx(0.5));
  CHECK(success_probability(m, 0) == doctest::Approx(0.9933).epsilon(1e-4));
  m.fatigue_acc = 1.0;
  CHECK(success_probability(m, 5) == doctest::Approx(0.0067).epsilon(1e-2));
  PlayerModel fresh;
  for (int d = 1; d < 10; ++d) CHECK(success_probability(fresh, d + 1) < success_probability(fresh, d));
  for (double f = 0; f < 1; f += 0.1) {
    PlayerModel a = fresh, b = fresh;
    a.fatigue_acc = f;
    b.fatigue_acc = f + 0.1;
    CHECK(success_probability(b, 5) < success_probability(a, 5));
  }
}

TEST_CASE("attempts accumulate fatigue and rest recovers it") {
  Rng rng(1);
  PlayerModel m;
  for (int i = 0; i < 100; ++i) m = attempt(m, 5, rng).model;
  CHECK(m.fatigue_acc == doctest::Approx(100 * 0.002 * 5));
  m = rest(m, 60);
  CHECK(m.fatigue_acc == doctest::Approx(0.7));
  m = rest(m, 1e6);
  CHECK(m.fatigue_acc == 0.0);
}

TEST_CASE("scenario json round-trip and validation") {
  for (const auto& name : bundled_scenario_names()) {
    const auto s = bundled_scenario(name, 3);
    CHECK_NOTHROW(validate(s));
    CHECK(scenario_from_json(to_json(s)) == s);
  }
  auto bad = bundled_scenario("rest");
  bad.phases[0].bpm_mean = 10;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_THROWS_AS(bundled_scenario("nope"), Error);
}

TEST_CASE("rest scenario produces one-second intervals") {
  auto s = bundled_scenario("rest", 2);
  const auto stream = generate_stream(s);
  std::vector<double> rr;
  int bpm_total = 0, bpm_n = 0;
  for (const auto& e : stream) {
    if (const auto* m = std::get_if<wire::EcgMsg>(&e.env.payload)) {
      for (auto raw : m->rr_raw) rr.push_back(ingest::rr_to_ms(raw));
      bpm_total += m->bpm;
      ++bpm_n;
    }
  }
  REQUIRE(rr.size() > 100);
  double mean = 0;
  for (double x : rr) mean += x;
  mean /= static_cast<double>(rr.size());
  CHECK(mean == doctest::Approx(1000.0).epsilon(0.02));
  CHECK(static_cast<double>(bpm_total) / bpm_n == doctest::Approx(60.0).epsilon(0.02));
}

TEST_CASE("zero jitter gives zero rmssd") {
  auto s = bundled_scenario("rest", 2);
  s.phases[0].rmssd_target_ms = 0;
  std::vector<double> rr;
  for (const auto& e : generate_stream(s))
    if (const auto* m = std::get_if<wire::EcgMsg>(&e.env.payload))
      for (auto raw : m->rr_raw) rr.push_back(ingest::rr_to_ms(raw));
  REQUIRE(rr.size() > 2);
  CHECK(fusion::rmssd(rr) == 0.0);
}

TEST_CASE("ecg bpm follows the script within 2%") {
  for (const auto& name : bundled_scenario_names()) {
    const auto s = bundled_scenario(name, 5);
    double offset = 0;
    std::size_t phase = 0;
    for (const auto& e : generate_stream(s)) {
      const auto* m = std::get_if<wire::EcgMsg>(&e.env.payload);
      if (!m) continue;
      const double at = static_cast<double>(e.t) / 1000.0;
      while (phase + 1 < s.phases.size() && at >= offset + s.phases[phase].duration_s)
        offset += s.phases[phase++].duration_s;
      const auto& p = s.phases[phase];
      const double want = std::clamp(p.bpm_mean + p.bpm_slope * (at - offset - p.duration_s / 2.0), 30.0, 220.0);
      CHECK(std::fabs(m->bpm - want) <= 0.02 * want + 0.5);
    }
  }
}

TEST_CASE("streams are a pure function of the seed") {
  const auto s = bundled_scenario("stress-spike", 11);
  CHECK(stream_hash(generate_stream(s)) == stream_hash(generate_stream(s)));
  CHECK(stream_hash(generate_stream(s)) != stream_hash(generate_stream(bundled_scenario("stress-spike", 12))));
  const auto st = generate_stream(s);
  for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i - 1].t <= st[i].t);
}

TEST_CASE("fatigue ramp drives inferred fatigue upward") {
  const auto s = bundled_scenario("fatigue-ramp", 3);
  runtime::Engine engine({}, 0);
  std::vector<cam::UserState> states;
  runtime::EngineHooks hooks;
  hooks.state = [&](const cam::UserState& st) { states.push_back(st); };
  engine.set_hooks(hooks);
  engine.start();
  StreamFeeder feeder;
  feeder.run(engine, generate_stream(s), static_cast<TimeMs>(s.duration_s() * 1000));
  const auto calib = static_cast<TimeMs>(s.phases.front().duration_s * 1000);
  double peak = 0;
  int checked = 0;
  for (const auto& st : states) {
    if (st.t < calib + 10'000) continue;
    CHECK(st.fatigue >= peak - 0.05);
    peak = std::max(peak, st.fatigue);
    ++checked;
  }
  CHECK(checked > 100);
  CHECK(peak > 0.5);
}

TEST_CASE("simulation is deterministic") {
  SimOptions o;
  o.seed = 4;
  o.duration_ms = 120'000;
  o.random_overrides_per_min = 1;
  const auto a = run_simulation(o), b = run_simulation(o);
  CHECK(a.directive_hash == b.directive_hash);
  CHECK(a.ticks.size() == b.ticks.size());
  CHECK(a.reports == b.reports);
  REQUIRE_FALSE(a.directives.empty());
  CHECK(a.directives.front().directive.rationale == std::vector<std::string>{"INIT"});
  // The game sees exactly what CAM sent.
  REQUIRE(a.received.size() == a.directives.size());
  for (std::size_t i = 0; i < a.received.size(); ++i)
    CHECK(a.received[i].same_action(a.directives[i].directive));
}

TEST_CASE("empty session replays as a no-op") {
  TempDir tmp;
  const auto r = replay_session(tmp.path);
  CHECK(r.empty);
  CHECK(r.directives.empty());
  CHECK(read_inputs(tmp.path).empty());
}

TEST_CASE("recorded simulation replays to the same directives") {
  TempDir tmp;
  SimOptions o;
  o.seed = 8;
  o.duration_ms = 90'000;
  o.overrides = {{20'000, {iam::OverrideKind::SetDifficulty, 7, std::nullopt, "t", 0}}};
  const auto sim = record_simulation(o, tmp.path);
  const auto r = replay_session(tmp.path);
  CHECK_FALSE(r.empty);
  CHECK(r.directive_hash == sim.directive_hash);
  CHECK(runtime::directive_sequence_hash(read_directives(tmp.path)) == sim.directive_hash);
  CHECK(r.inputs == read_inputs(tmp.path).size());
}

TEST_CASE("truncated log line is reported with its position") {
  TempDir tmp;
  SimOptions o;
  o.duration_ms = 20'000;
  record_simulation(o, tmp.path);
  const auto raw = tmp.path / std::string(file_name(LogStream::Raw));
  std::size_t lines = 0;
  {
    std::ifstream in(raw);
    std::string l;
    while (std::getline(in, l)) ++lines;
  }
  std::ofstream(raw, std::ios::app) << "{\"ord\":12";
  try {
    replay_session(tmp.path);
    FAIL("replayed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorruptLog);
    CHECK(e.field() == "raw.jsonl:" + std::to_string(lines + 1));
  }
}
