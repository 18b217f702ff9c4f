#include <doctest.h>

#include <random>

#include "blexer/common/error.hpp"
#include "blexer/common/ring_buffer.hpp"
#include "blexer/ingest/baseline.hpp"
#include "blexer/ingest/rr.hpp"
#include "blexer/ingest/session.hpp"
#include "oracles.hpp"

using namespace blexer;
using namespace blexer::ingest;

TEST_CASE("rr_to_ms examples") {
  CHECK(rr_to_ms(1024) == 1000.0);
  CHECK(rr_to_ms(512) == 500.0);
  CHECK(rr_to_ms(1126) == 1099.609375);
  CHECK_THROWS_AS(rr_to_ms(0), Error);
}

TEST_CASE("rr_to_ms is the exact inverse of the unit scaling on [1, 2^20]") {
  std::size_t bad = 0;
  for (std::uint32_t raw = 1; raw <= (1u << 20); ++raw)
    if (!oracle::rr_exact(raw, rr_to_ms(raw))) ++bad;
  CHECK(bad == 0);
}

TEST_CASE("artifact rejection examples") {
  const std::vector<double> a{800, 810, 3000, 790};
  const auto r = reject_artifacts(a);
  CHECK(r.kept == std::vector<double>{800, 810, 790});
  CHECK(r.dropped == 1);

  const std::vector<double> jump{800, 1200};
  const auto j = reject_artifacts(jump);
  CHECK(j.kept == std::vector<double>{800});
  CHECK(j.dropped == 1);

  const auto empty = reject_artifacts(std::vector<double>{});
  CHECK(empty.kept.empty());
  CHECK(empty.dropped == 0);
}

TEST_CASE("artifact rejection uses the reference interval") {
  const std::vector<double> a{1200};
  CHECK(reject_artifacts(a, {}, 800.0).dropped == 1);
  CHECK(reject_artifacts(a, {}, 1100.0).dropped == 0);
}

TEST_CASE("artifact rejection is idempotent and keeps the range") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(100, 2600);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> rr(g() % 40);
    for (auto& x : rr) x = u(g);
    const auto once = reject_artifacts(rr);
    CHECK(once.kept.size() + once.dropped == rr.size());
    for (double x : once.kept) {
      CHECK(x >= 300.0);
      CHECK(x <= 2000.0);
    }
    const auto twice = reject_artifacts(once.kept);
    CHECK(twice.kept == once.kept);
    CHECK(twice.dropped == 0);
  }
}

TEST_CASE("baseline of a constant rate") {
  BaselineTracker b;
  for (TimeMs t = 0; t <= 60'000; t += 1000) b.update(70, t);
  CHECK(b.current().complete);
  CHECK(b.current().resting_bpm == doctest::Approx(70.0));
  CHECK(b.current().calib_duration_s >= 60.0);
}

TEST_CASE("baseline is the arithmetic mean and freezes") {
  BaselineTracker b;
  for (TimeMs t = 0; t < 60'000; t += 1000) b.update(t % 2000 == 0 ? 60 : 80, t);
  b.tick(60'000);
  REQUIRE(b.current().complete);
  CHECK(b.current().resting_bpm == doctest::Approx(70.0));
  const Baseline frozen = b.current();
  b.update(150, 61'000);
  b.update(150, 200'000);
  CHECK(b.current() == frozen);
}

TEST_CASE("baseline ignores zero bpm") {
  BaselineTracker b;
  b.update(0, 0);
  b.update(65, 1000);
  b.update(0, 2000);
  b.tick(61'000);
  CHECK(b.current().resting_bpm == doctest::Approx(65.0));
}

TEST_CASE("ecg packet becomes one sample with converted intervals") {
  std::vector<NormalizedItem> forwarded;
  SensorSession s("s", wire::DeviceType::EcgChest, {}, [&](NormalizedItem i) { forwarded.push_back(i); });
  const auto out = s.accept_packet({1, 500, wire::EcgMsg{72, {1024, 1024}}}, 1000);
  REQUIRE(out.size() == 1);
  const auto& e = std::get<EcgSample>(out[0]);
  CHECK(e.rr_ms == std::vector<double>{1000.0, 1000.0});
  CHECK(e.bpm == 72);
  CHECK(e.device_ts == 500);
  CHECK(e.hub_ts == 1000);
  CHECK(forwarded.size() == 1);
  CHECK(s.buffer().size() == 1);
}

TEST_CASE("ppg packet passes through") {
  SensorSession s("s", wire::DeviceType::PpgWrist);
  const auto out = s.accept_packet({1, 0, wire::PpgMsg{80, {0, 0, 1}, 95}}, 10);
  REQUIRE(out.size() == 1);
  const auto& p = std::get<PpgSample>(out[0]);
  CHECK(p.bpm == 80);
  CHECK(p.accel == Vec3{0, 0, 1});
  CHECK(p.confidence == 95);
}

TEST_CASE("ppg accel is clamped to 16 G") {
  SensorSession s("s", wire::DeviceType::PpgWrist);
  const auto out = s.accept_packet({1, 0, wire::PpgMsg{80, {40, -30, 2}, 50}}, 10);
  const auto& p = std::get<PpgSample>(out[0]);
  CHECK(p.accel == Vec3{16, -16, 2});
}

TEST_CASE("packet of another stream is rejected") {
  SensorSession s("s", wire::DeviceType::PpgWrist);
  try {
    s.accept_packet({1, 0, wire::EcgMsg{70, {1024}}}, 0);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WrongStream);
  }
  CHECK(s.counters().wrong_stream == 1);
  CHECK(s.buffer().empty());
}

TEST_CASE("device clock regression beyond the limit is dropped") {
  SensorSession s("s", wire::DeviceType::EcgChest);
  s.accept_packet({1, 50'000, wire::EcgMsg{70, {1024}}}, 0);
  s.accept_packet({2, 45'000, wire::EcgMsg{70, {1024}}}, 1000);
  try {
    s.accept_packet({3, 30'000, wire::EcgMsg{70, {1024}}}, 2000);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StaleTimestamp);
  }
  CHECK(s.counters().stale_dropped == 1);
  CHECK(s.counters().accepted == 2);
}

TEST_CASE("affect sample is reduced only when a face was seen") {
  SensorSession s("s", wire::DeviceType::Mocap);
  wire::SkelAffectMsg m;
  m.emotion7 = std::array<double, 7>{0, 0, 1, 0, 0, 0, 0};
  m.face_detected = true;
  const auto a = std::get<AffectSample>(s.accept_packet({1, 0, m}, 0)[0]);
  REQUIRE(a.affect);
  CHECK(a.affect->negative() == 1.0);
  m.face_detected = false;
  const auto b = std::get<AffectSample>(s.accept_packet({2, 0, m}, 0)[0]);
  CHECK_FALSE(b.affect);
}

TEST_CASE("rr artifacts are dropped across packets") {
  SensorSession s("s", wire::DeviceType::EcgChest);
  s.accept_packet({1, 0, wire::EcgMsg{60, {1024}}}, 0);
  const auto out = s.accept_packet({2, 0, wire::EcgMsg{60, {2048, 1030}}}, 1000);
  const auto& e = std::get<EcgSample>(out[0]);
  CHECK(e.rr_dropped == 1);
  CHECK(e.rr_ms.size() == 1);
  CHECK(s.counters().rr_dropped == 1);
}

TEST_CASE("samples survive the raw log encoding") {
  SensorSession s("s", wire::DeviceType::EcgChest);
  const auto ecg = s.accept_packet({4, 7, wire::EcgMsg{66, {1000, 1010}}}, 99)[0];
  const auto back = sample_from_json(sample_to_json(ecg));
  REQUIRE(back);
  CHECK(*back == ecg);
  CHECK_FALSE(sample_from_json(nlohmann::json{{"kind", "nope"}}));
}

TEST_CASE("ring buffer evicts the oldest and never grows") {
  RingBuffer<int> r(3);
  for (int i = 0; i < 10; ++i) {
    r.push(i);
    CHECK(r.size() <= 3);
  }
  CHECK(r.front() == 7);
  CHECK(r.back() == 9);
  CHECK(r.evicted() == 7);
  CHECK_THROWS(RingBuffer<int>(0));
}

TEST_CASE("every accepted sample reaches the log once") {
  struct Sink : EventSink {
    std::vector<nlohmann::json> raw;
    void append(LogStream s, const nlohmann::json& r) override {
      if (s == LogStream::Raw) raw.push_back(r);
    }
  } sink;
  SensorSession s("s", wire::DeviceType::PpgWrist, {}, {}, &sink);
  for (std::uint64_t i = 1; i <= 50; ++i) s.accept_packet({i, 0, wire::PpgMsg{70, {}, 90}}, 0);
  CHECK_THROWS(s.accept_packet({51, 0, wire::EcgMsg{}}, 0));
  CHECK(sink.raw.size() == 50);
}
