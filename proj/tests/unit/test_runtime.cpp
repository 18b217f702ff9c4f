#include <doctest.h>

#include <map>

#include "blexer/cam/config_io.hpp"
#include "blexer/common/error.hpp"
#include "blexer/runtime/config.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/simkit/scenario.hpp"
#include "feed.hpp"

using namespace blexer;
using namespace blexer::runtime;

namespace {

struct Run {
  std::vector<cam::Directive> directives;
  std::vector<cam::UserState> states;
  std::uint64_t hash = 0;
};

Run run_scenario(const std::string& name, std::uint64_t seed, TimeMs until) {
  Run r;
  EngineHooks hooks;
  hooks.directive = [&](const cam::Directive& d) { r.directives.push_back(d); };
  hooks.state = [&](const cam::UserState& s) { r.states.push_back(s); };
  Engine engine({}, 0, nullptr, hooks);
  engine.start();
  StreamFeeder f;
  f.run(engine, simkit::generate_stream(simkit::bundled_scenario(name, seed)), until);
  r.hash = engine.state_hash();
  return r;
}

struct CountingSink : EventSink {
  std::map<LogStream, std::vector<nlohmann::json>> records;
  void append(LogStream s, const nlohmann::json& j) override { records[s].push_back(j); }
};

}  // namespace

TEST_CASE("engine starts from the initial directive") {
  std::vector<cam::Directive> out;
  EngineHooks hooks;
  hooks.directive = [&](const cam::Directive& d) { out.push_back(d); };
  Engine e({}, 1000, nullptr, hooks);
  CHECK_FALSE(e.active());
  e.start();
  CHECK(e.active());
  REQUIRE(out.size() == 1);
  CHECK(out[0].rationale == std::vector<std::string>{"INIT"});
  CHECK(out[0] == e.current_directive());
  CHECK(e.meta()["session_id"] == "session");
  CHECK(e.meta()["started_at"] == 1000);
}

TEST_CASE("engine runs are deterministic") {
  const auto a = run_scenario("stress-spike", 5, 200'000);
  const auto b = run_scenario("stress-spike", 5, 200'000);
  CHECK(a.hash == b.hash);
  CHECK(directive_sequence_hash(a.directives) == directive_sequence_hash(b.directives));
  CHECK(a.states == b.states);
  CHECK(a.states.size() >= 190);
}

TEST_CASE("inferred indices stay in range") {
  for (const auto& name : simkit::bundled_scenario_names()) {
    const auto r = run_scenario(name, 2, 240'000);
    for (const auto& s : r.states) {
      CHECK(s.fatigue >= 0.0);
      CHECK(s.fatigue <= 1.0);
      CHECK(s.engagement >= 0.0);
      CHECK(s.engagement <= 1.0);
      CHECK(s.workload >= 0.0);
      CHECK(s.workload <= 1.0);
      CHECK(s.confidence >= 0.0);
      CHECK(s.confidence <= 1.0);
    }
    for (std::size_t i = 1; i < r.directives.size(); ++i) CHECK_NOTHROW(cam::validate_directive(r.directives[i]));
  }
}

TEST_CASE("reading state does not change it") {
  Engine e({}, 0);
  e.start();
  StreamFeeder f;
  f.run(e, simkit::generate_stream(simkit::bundled_scenario("steady-exercise", 1)), 90'000);
  const auto h = e.state_hash();
  (void)e.meta();
  (void)e.context();
  (void)e.memory();
  (void)e.last_state();
  (void)e.last_features();
  (void)e.alerts();
  (void)e.baseline();
  CHECK(e.state_hash() == h);
}

TEST_CASE("every input is logged with ord and at") {
  CountingSink sink;
  Engine e({}, 0, &sink);
  e.start();
  StreamFeeder f;
  f.run(e, simkit::generate_stream(simkit::bundled_scenario("rest", 1)), 30'000);
  ipm::PerformanceReport rep;
  rep.exercise_id = "alternating_arm_lifts";
  rep.success_rate = 0.5;
  rep.reps_done = 4;
  e.on_report(rep, 30'500);
  e.apply_override({iam::OverrideKind::ForceRest, std::nullopt, std::nullopt, "x", 0}, 31'000);
  const auto& raw = sink.records[LogStream::Raw];
  REQUIRE_FALSE(raw.empty());
  CHECK(sink.records[LogStream::Reports].size() == 1);
  CHECK(sink.records[LogStream::Overrides].size() == 1);
  std::vector<std::uint64_t> ords;
  for (auto s : {LogStream::Raw, LogStream::Reports, LogStream::Overrides})
    for (const auto& j : sink.records[s]) {
      ords.push_back(j.at("ord").get<std::uint64_t>());
      CHECK(j.contains("at"));
    }
  std::sort(ords.begin(), ords.end());
  CHECK(std::adjacent_find(ords.begin(), ords.end()) == ords.end());
  CHECK(ords.size() == e.inputs());
  CHECK(sink.records[LogStream::States].size() >= 29);
  CHECK_FALSE(sink.records[LogStream::Directives].empty());
}

TEST_CASE("override through the engine") {
  Engine e({}, 0);
  CHECK_THROWS_AS(e.apply_override({iam::OverrideKind::Pause, {}, {}, "", 0}, 0), Error);
  e.start();
  const auto d = e.apply_override({iam::OverrideKind::SetDifficulty, 3, {}, "therapist", 0}, 500);
  CHECK(d.difficulty_target == 3);
  CHECK(e.current_directive() == d);
  CHECK(e.memory().override_until);
  try {
    e.apply_override({iam::OverrideKind::SetDifficulty, 14, {}, "therapist", 0}, 600);
    FAIL("accepted");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::InvalidOverride);
  }
  CHECK(e.current_directive() == d);
  e.close(1000);
  CHECK_FALSE(e.active());
  CHECK_THROWS_AS(e.apply_override({iam::OverrideKind::ForceRest, {}, {}, "", 0}, 1100), Error);
}

TEST_CASE("plan and rules can be swapped mid-session") {
  Engine e({}, 0);
  e.start();
  cam::TherapyPlan p;
  p.fatigue_threshold = 0.7;
  e.set_plan(p, 100);
  CHECK(e.context().plan.fatigue_threshold == 0.7);
  p.engagement_threshold = 0.9;
  CHECK_THROWS_AS(e.set_plan(p, 200), Error);
  cam::RuleConfig r;
  r.dwell_ms = 0;
  CHECK_THROWS_AS(e.set_rules(r, 300), Error);
}

TEST_CASE("unexpected disconnect raises an alert") {
  std::vector<iam::Alert> alerts;
  EngineHooks hooks;
  hooks.alert = [&](const iam::Alert& a) { alerts.push_back(a); };
  Engine e({}, 0, nullptr, hooks);
  e.start();
  e.connection_closed("ppg", true, 10);
  CHECK(alerts.empty());
  e.connection_closed("ppg", false, 20);
  REQUIRE(alerts.size() == 1);
  CHECK(alerts[0].kind == iam::AlertKind::Disconnect);
  CHECK(e.acknowledge_alert(alerts[0].id));
}

TEST_CASE("hub config from json and environment") {
  HubConfig c = hub_config_from_json({{"port_ecg", 9200}, {"sessions_dir", "/tmp/x"}});
  CHECK(c.port_ecg == 9200);
  CHECK(c.port_ppg == 9102);
  CHECK(c.http_port == 8080);
  CHECK(c.sessions_dir == "/tmp/x");
  CHECK(hub_config_from_json(to_json(c)).port_ecg == 9200);
  CHECK_THROWS_AS(hub_config_from_json({{"port_ecg", "abc"}}), Error);

  std::map<std::string, std::string> env{{"BLEXER_PORT_GAME", "9999"}, {"BLEXER_HTTP_PORT", "8181"}};
  apply_env(c, [&](const char* k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  CHECK(c.port_game == 9999);
  CHECK(c.http_port == 8181);
  CHECK(c.port_ecg == 9200);
  env = {{"BLEXER_PORT_SKEL", "99999"}};
  CHECK_THROWS_AS(apply_env(c, [&](const char* k) -> std::optional<std::string> {
                    auto it = env.find(k);
                    if (it == env.end()) return std::nullopt;
                    return it->second;
                  }),
                  Error);
}

TEST_CASE("directive sequence hash is order-sensitive") {
  cam::Directive a, b;
  b.difficulty_target = 4;
  CHECK(directive_sequence_hash({a, b}) != directive_sequence_hash({b, a}));
  CHECK(directive_sequence_hash({a, b}) == directive_sequence_hash({a, b}));
}
