#include <doctest.h>

#include <nlohmann/json.hpp>

#include "blexer/common/error.hpp"
#include "blexer/wire/codec.hpp"
#include "blexer/wire/handshake.hpp"
#include "gen.hpp"

using namespace blexer;
using namespace blexer::wire;
using nlohmann::json;

namespace {

Errc decode_error(std::string_view text) {
  try {
    decode(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode accepted " << text);
  return Errc::InvalidConfig;
}

Envelope hello(DeviceType d, std::uint64_t seq = 1) {
  HelloMsg h;
  h.device_type = d;
  h.capabilities = {"ECG"};
  return {seq, 0, h};
}

}  // namespace

TEST_CASE("ecg envelope serializes rr_raw verbatim") {
  const std::string line = encode({1, 0, EcgMsg{72, {1024}}});
  CHECK(line.back() == '\n');
  CHECK(line.find('\n') == line.size() - 1);
  CHECK(line.find("\"rr_raw\":[1024]") != std::string::npos);
  CHECK(line.find("\"msg_type\":\"ECG\"") != std::string::npos);
}

TEST_CASE("heartbeat has an empty payload object") {
  const std::string line = encode({9, 0, HeartbeatMsg{}});
  CHECK(line.find("\"payload\":{}") != std::string::npos);
  CHECK(decode(line) == Envelope{9, 0, HeartbeatMsg{}});
}

TEST_CASE("datagram encoding has no terminator") {
  const std::string d = encode_datagram({3, 5, HeartbeatMsg{}});
  CHECK(d.back() == '}');
  CHECK(decode(d) == Envelope{3, 5, HeartbeatMsg{}});
}

TEST_CASE("decode accepts an empty rr list") {
  const auto env = decode(R"({"msg_type":"ECG","seq":2,"sent_at":0,"payload":{"bpm":60,"rr_raw":[]}})");
  REQUIRE(env.type() == MsgType::Ecg);
  CHECK(env.seq == 2);
  CHECK(std::get<EcgMsg>(env.payload).bpm == 60);
  CHECK(std::get<EcgMsg>(env.payload).rr_raw.empty());
}

TEST_CASE("decode error kinds") {
  CHECK(decode_error(R"({"msg_type":"EC)") == Errc::MalformedJson);
  CHECK(decode_error(R"({"msg_type":"XYZ","seq":1,"sent_at":0,"payload":{}})") == Errc::UnknownType);
  CHECK(decode_error(R"({"msg_type":"ECG","seq":1,"sent_at":0,"payload":{"bpm":"x","rr_raw":[]}})") ==
        Errc::SchemaViolation);
  CHECK(decode_error(R"({"msg_type":"ECG","seq":-1,"sent_at":0,"payload":{"bpm":1,"rr_raw":[]}})") ==
        Errc::SchemaViolation);
  CHECK(decode_error(R"({"msg_type":"HELLO","seq":1,"sent_at":0,"payload":{"device_type":"ECG_CHEST","protocol_version":1,"capabilities":[]}})") ==
        Errc::SchemaViolation);
  CHECK(decode_error("[1,2,3]") == Errc::SchemaViolation);
  CHECK(decode_error("") == Errc::MalformedJson);
  CHECK(decode_error(std::string(kMaxFrameBytes + 10, ' ')) == Errc::MalformedJson);
  CHECK(decode_error(std::string(5000, '[')) == Errc::MalformedJson);
}

TEST_CASE("schema errors name the field") {
  try {
    decode(R"({"msg_type":"PPG","seq":1,"sent_at":0,"payload":{"bpm":70,"accel":[0,0,1],"confidence":140}})");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaViolation);
    CHECK(std::string(e.what()).find("confidence") != std::string::npos);
  }
}

TEST_CASE("unknown payload fields are ignored") {
  const auto env = decode(
      R"({"msg_type":"PPG","seq":1,"sent_at":4,"extra":1,"payload":{"bpm":70,"accel":[0,0,1],"confidence":95,"gyro":[1,2,3]}})");
  CHECK(std::get<PpgMsg>(env.payload) == PpgMsg{70, {0, 0, 1}, 95});
}

TEST_CASE("directive extensions survive a round trip") {
  cam::Directive d;
  d.extensions["mini_game_id"] = "\"whack\"";
  const auto back = std::get<cam::Directive>(decode(encode({1, 0, d})).payload);
  CHECK(back == d);
}

TEST_CASE("round trip over random envelopes") {
  gen::Eng g(20240611);
  for (int i = 0; i < 2000; ++i) {
    const Envelope m = gen::envelope(g);
    const Envelope back = decode(encode(m));
    REQUIRE_MESSAGE(back == m, encode(m));
    CHECK(decode(encode_datagram(m)) == m);
  }
}

TEST_CASE("fuzzed input only ever raises library errors") {
  gen::Eng g(99);
  for (int i = 0; i < 3000; ++i) {
    std::string bytes = encode(gen::envelope(g));
    const auto edits = 1 + gen::below(g, 4);
    for (std::size_t k = 0; k < edits && !bytes.empty(); ++k) {
      const auto pos = gen::below(g, bytes.size());
      switch (gen::below(g, 3)) {
        case 0: bytes[pos] = static_cast<char>(gen::below(g, 256)); break;
        case 1: bytes.erase(pos, 1 + gen::below(g, 8)); break;
        default: bytes.insert(pos, 1, "{}[]\",:0"[gen::below(g, 8)]); break;
      }
    }
    try {
      decode(bytes);
    } catch (const Error&) {
    } catch (...) {
      FAIL("foreign exception for input " << bytes);
    }
  }
}

TEST_CASE("line framer splits, buffers and drops oversize frames") {
  LineFramer f;
  std::vector<std::string> lines;
  auto sink = [&](std::string_view l) { lines.emplace_back(l); };
  f.feed("ab", sink);
  CHECK(lines.empty());
  CHECK(f.pending_bytes() == 2);
  f.feed("c\nde\n\nf", sink);
  CHECK(lines == std::vector<std::string>{"abc", "de", ""});
  f.feed(std::string(kMaxFrameBytes + 5, 'x'), sink);
  f.feed("\nok\n", sink);
  CHECK(f.oversize_frames() == 1);
  CHECK(lines.back() == "ok");
  CHECK(lines.size() == 4);
}

TEST_CASE("handshake transitions") {
  ConnState s;
  const auto r = handshake_step(s, hello(DeviceType::EcgChest), 100, "sess");
  CHECK(r.state.phase == ConnPhase::Active);
  REQUIRE(r.reply);
  CHECK(std::get<AckMsg>(r.reply->payload).session_id == "sess");
  CHECK(r.state.last_heartbeat == 100);

  const auto data = handshake_step(r.state, {2, 0, EcgMsg{70, {}}}, 900);
  CHECK(data.state.phase == ConnPhase::Active);
  CHECK(data.state.last_heartbeat == 900);
  CHECK_FALSE(data.reply);

  const auto bye = handshake_step(data.state, {3, 0, ByeMsg{"done"}}, 1000);
  CHECK(bye.state.phase == ConnPhase::Closed);
  CHECK(bye.state.closed_by_peer);
  CHECK_FALSE(bye.reply);
  CHECK_THROWS_AS(handshake_step(bye.state, {4, 0, HeartbeatMsg{}}, 1100), Error);
}

TEST_CASE("data before HELLO is a protocol violation") {
  ConnState s;
  for (int t = 2; t <= 10; ++t) {
    gen::Eng g(static_cast<std::uint64_t>(t));
    Envelope e{1, 0, gen::payload(g, static_cast<MsgType>(t))};
    try {
      handshake_step(s, e, 0);
      FAIL("accepted " << to_string(e.type()));
    } catch (const Error& err) {
      CHECK(err.code() == Errc::ProtocolViolation);
    }
  }
}

TEST_CASE("handshake rejects duplicate HELLO, old versions and repeated seq") {
  ConnState s = handshake_step({}, hello(DeviceType::PpgWrist, 5), 0).state;
  CHECK_THROWS_AS(handshake_step(s, hello(DeviceType::PpgWrist, 6), 0), Error);
  CHECK_THROWS_AS(handshake_step(s, {5, 0, HeartbeatMsg{}}, 0), Error);
  auto v2 = hello(DeviceType::PpgWrist);
  std::get<HelloMsg>(v2.payload).protocol_version = 2;
  CHECK_THROWS_AS(handshake_step({}, v2, 0), Error);
}

TEST_CASE("seq gaps are counted") {
  ConnState s = handshake_step({}, hello(DeviceType::EcgChest, 1), 0).state;
  s = handshake_step(s, {2, 0, HeartbeatMsg{}}, 0).state;
  s = handshake_step(s, {6, 0, HeartbeatMsg{}}, 0).state;
  CHECK(s.seq_gaps == 3);
}

TEST_CASE("liveness timeout closes silent connections") {
  ConnState s = handshake_step({}, hello(DeviceType::EcgChest), 1000).state;
  CHECK(check_liveness(s, 6000).phase == ConnPhase::Active);
  const auto dead = check_liveness(s, 6001);
  CHECK(dead.phase == ConnPhase::Closed);
  CHECK_FALSE(dead.closed_by_peer);
}

// HELLO (data|HEARTBEAT)* BYE is the accepted language; random message
// sequences are accepted exactly when they match it.
TEST_CASE("handshake accepts exactly HELLO (data|HEARTBEAT)* BYE") {
  gen::Eng g(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = 1 + gen::below(g, 6);
    std::vector<MsgType> types;
    for (std::size_t i = 0; i < n; ++i) {
      // Bias toward well-formed sequences.
      if (i == 0 && gen::below(g, 3) != 0) types.push_back(MsgType::Hello);
      else if (i == n - 1 && gen::coin(g)) types.push_back(MsgType::Bye);
      else types.push_back(static_cast<MsgType>(gen::below(g, 11)));
    }
    bool expect_ok = types.front() == MsgType::Hello;
    for (std::size_t i = 1; i < types.size() && expect_ok; ++i) {
      const auto t = types[i];
      const bool last = i == types.size() - 1;
      if (t == MsgType::Hello || t == MsgType::Ack) expect_ok = false;
      if (t == MsgType::Bye && !last) expect_ok = false;
    }
    ConnState s;
    bool ok = true;
    try {
      for (std::size_t i = 0; i < types.size(); ++i) {
        Envelope e{i + 1, 0, gen::payload(g, types[i])};
        if (types[i] == MsgType::Hello) std::get<HelloMsg>(e.payload).protocol_version = 1;
        s = handshake_step(s, e, 0).state;
      }
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ProtocolViolation);
      ok = false;
    }
    CHECK(ok == expect_ok);
  }
}
