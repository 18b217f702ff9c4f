#include <doctest.h>

#include <cmath>
#include <fstream>

#include "blexer/cam/rules.hpp"
#include "blexer/common/error.hpp"
#include "blexer/iam/alerts.hpp"
#include "blexer/iam/overrides.hpp"
#include "blexer/iam/recorder.hpp"
#include "tmpdir.hpp"

using namespace blexer;
using namespace blexer::iam;

namespace {

cam::UserState fatigue_at(TimeMs t, double f) {
  cam::UserState s;
  s.t = t;
  s.fatigue = f;
  s.confidence = 1.0;
  return s;
}

cam::Directive at_difficulty(int level) {
  cam::Directive d;
  d.difficulty_target = level;
  d.repetitions = 10;
  d.duration_s = 30;
  return d;
}

OverrideCommand cmd(OverrideKind k, std::optional<int> level = std::nullopt) {
  OverrideCommand c;
  c.kind = k;
  c.level = level;
  return c;
}

}  // namespace

TEST_CASE("a threshold crossing raises one warning") {
  AlertEvaluator ev;
  CHECK_FALSE(ev.evaluate(fatigue_at(0, 0.7), 0.8));
  const auto a = ev.evaluate(fatigue_at(1000, 0.85), 0.8);
  REQUIRE(a);
  CHECK(a->kind == AlertKind::FatigueThreshold);
  CHECK(a->severity == Severity::Warning);
  CHECK(a->t == 1000);
  CHECK(a->detail.find("0.85") != std::string::npos);
  CHECK_FALSE(ev.evaluate(fatigue_at(2000, 0.9), 0.8));
  CHECK(ev.history().size() == 1);
}

TEST_CASE("oscillating fatigue alerts at most once per minute") {
  AlertEvaluator ev;
  for (TimeMs t = 0; t <= 600'000; t += 1000) ev.evaluate(fatigue_at(t, (t / 1000) % 2 ? 0.85 : 0.75), 0.8);
  const auto n = ev.history().size();
  CHECK(n >= 1);
  CHECK(n <= static_cast<std::size_t>(std::ceil(600.0 / 60.0)) + 1);
  for (std::size_t i = 1; i < n; ++i) CHECK(ev.history()[i].t - ev.history()[i - 1].t >= 60'000);
}

TEST_CASE("sustained fatigue does not repeat the alert") {
  AlertEvaluator ev;
  for (TimeMs t = 0; t <= 600'000; t += 1000) ev.evaluate(fatigue_at(t, 0.85), 0.8);
  CHECK(ev.history().size() == 1);
}

TEST_CASE("crossing inside the re-arm period fires when it ends") {
  AlertEvaluator ev;
  CHECK(ev.evaluate(fatigue_at(0, 0.9), 0.8));
  CHECK_FALSE(ev.evaluate(fatigue_at(10'000, 0.5), 0.8));
  CHECK_FALSE(ev.evaluate(fatigue_at(20'000, 0.9), 0.8));
  CHECK_FALSE(ev.evaluate(fatigue_at(59'999, 0.9), 0.8));
  CHECK(ev.evaluate(fatigue_at(60'000, 0.9), 0.8));
}

TEST_CASE("expected closes raise nothing and drops raise a disconnect") {
  AlertEvaluator ev;
  CHECK_FALSE(ev.connection_closed("ecg", true, 10));
  const auto a = ev.connection_closed("ecg", false, 20);
  REQUIRE(a);
  CHECK(a->kind == AlertKind::Disconnect);
  CHECK(ev.acknowledge(a->id));
  CHECK(ev.history().back().acknowledged);
  CHECK_FALSE(ev.acknowledge(999));
  CHECK(ev.data_quality("ppg confidence low", Severity::Info, 30).kind == AlertKind::DataQuality);
}

TEST_CASE("alert enums round-trip through their names") {
  for (auto k : {AlertKind::FatigueThreshold, AlertKind::Disconnect, AlertKind::DataQuality})
    CHECK(parse_alert_kind(to_string(k)) == k);
  for (auto s : {Severity::Info, Severity::Warning, Severity::Critical}) CHECK(parse_severity(to_string(s)) == s);
  for (auto k : {OverrideKind::SetDifficulty, OverrideKind::ForceRest, OverrideKind::SwitchCategory,
                 OverrideKind::Pause, OverrideKind::Resume})
    CHECK(parse_override_kind(to_string(k)) == k);
  CHECK_FALSE(parse_override_kind("REBOOT"));
}

TEST_CASE("set difficulty override") {
  cam::DecisionMemory mem;
  const auto d = synthesize_override(cmd(OverrideKind::SetDifficulty, 3), at_difficulty(6), fatigue_at(0, 0.2),
                                     {}, {}, mem, 5000);
  CHECK(d.difficulty_target == 3);
  CHECK(d.rationale == std::vector<std::string>{"OVERRIDE:SET_DIFFICULTY"});
  CHECK(d.issued_at == 5000);
  CHECK(mem.override_until == 5000 + cam::RuleConfig{}.dwell_ms);
  CHECK(mem.last_difficulty_change == 5000);
  CHECK_NOTHROW(cam::validate_directive(d));
}

TEST_CASE("out-of-range override is rejected") {
  cam::DecisionMemory mem;
  try {
    synthesize_override(cmd(OverrideKind::SetDifficulty, 14), at_difficulty(6), {}, {}, {}, mem, 0);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidOverride);
    CHECK(e.field() == "value");
  }
  CHECK_FALSE(mem.override_until);
  CHECK_THROWS_AS(validate_override(cmd(OverrideKind::SetDifficulty), false), Error);
  CHECK_THROWS_AS(validate_override(cmd(OverrideKind::SwitchCategory), false), Error);
  CHECK_THROWS_AS(validate_override(cmd(OverrideKind::SetDifficulty, 0), false), Error);
}

TEST_CASE("pause and resume alternate") {
  cam::DecisionMemory mem;
  auto d = synthesize_override(cmd(OverrideKind::Pause), at_difficulty(4), {}, {}, {}, mem, 0);
  CHECK(d.rest);
  CHECK(mem.paused);
  CHECK_THROWS_AS(synthesize_override(cmd(OverrideKind::Pause), d, {}, {}, {}, mem, 1), Error);
  d = synthesize_override(cmd(OverrideKind::Resume), d, {}, {}, {}, mem, 2);
  CHECK_FALSE(d.rest);
  CHECK_FALSE(mem.paused);
  CHECK_THROWS_AS(synthesize_override(cmd(OverrideKind::Resume), d, {}, {}, {}, mem, 3), Error);
}

TEST_CASE("safety still applies on top of an override") {
  cam::DecisionMemory mem;
  const auto d = synthesize_override(cmd(OverrideKind::SetDifficulty, 9), at_difficulty(5), fatigue_at(0, 0.9),
                                     {}, {}, mem, 100);
  CHECK(d.difficulty_target <= 4);
  CHECK(d.rest);
  CHECK(d.rationale.back() == "R1");
  CHECK_NOTHROW(cam::validate_directive(d, 5));
}

TEST_CASE("switch category override") {
  cam::DecisionMemory mem;
  auto c = cmd(OverrideKind::SwitchCategory);
  c.category = cam::TaskCategory::Memory;
  const auto d = synthesize_override(c, at_difficulty(5), {}, {}, {}, mem, 0);
  CHECK(d.task_category == cam::TaskCategory::Memory);
  CHECK(d.repetitions == cam::scaled_repetitions({}, cam::TaskCategory::Memory, 5));
}

TEST_CASE("recorder keeps records in order") {
  auto storage = std::make_unique<MemoryStorage>();
  auto* mem = storage.get();
  Recorder r(std::move(storage));
  for (int i = 0; i < 1000; ++i) r.append(LogStream::States, {{"i", i}});
  CHECK(r.count(LogStream::States) == 1000);
  const auto& lines = mem->lines(LogStream::States);
  REQUIRE(lines.size() == 1000);
  for (int i = 0; i < 1000; ++i) CHECK(nlohmann::json::parse(lines[static_cast<std::size_t>(i)])["i"] == i);
  CHECK(mem->lines(LogStream::Raw).empty());
}

TEST_CASE("storage failure is reported once and recording stops") {
  int failures = 0;
  Errc seen{};
  auto storage = std::make_unique<MemoryStorage>(10);
  auto* mem = storage.get();
  Recorder r(std::move(storage), [&](const Error& e) {
    ++failures;
    seen = e.code();
  });
  for (int i = 0; i < 50; ++i) r.append(LogStream::Raw, {{"i", i}});
  CHECK(failures == 1);
  CHECK(seen == Errc::StorageFull);
  CHECK(r.failed());
  CHECK(mem->lines(LogStream::Raw).size() == 10);
}

TEST_CASE("file storage writes one jsonl per stream") {
  TempDir tmp;
  {
    Recorder r(std::make_unique<FileStorage>(tmp.path / "s1"));
    r.append(LogStream::Directives, {{"a", 1}});
    r.append(LogStream::Directives, {{"a", 2}});
    r.append(LogStream::Alerts, {{"b", "x"}});
  }
  std::ifstream in(tmp.path / "s1" / std::string(file_name(LogStream::Directives)));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) CHECK(nlohmann::json::parse(line)["a"] == ++n);
  CHECK(n == 2);
  CHECK(std::filesystem::exists(tmp.path / "s1" / std::string(file_name(LogStream::Alerts))));
}

TEST_CASE("session meta round-trip") {
  TempDir tmp;
  CHECK(read_session_meta(tmp.path).is_null());
  const nlohmann::json meta{{"session_id", "abc"}, {"seed", 7}};
  write_session_meta(tmp.path, meta);
  CHECK(read_session_meta(tmp.path) == meta);
  std::ofstream(tmp.path / kSessionMetaFile) << "{broken";
  CHECK_THROWS_AS(read_session_meta(tmp.path), Error);
}
