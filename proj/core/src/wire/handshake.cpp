#include "blexer/wire/handshake.hpp"

#include "blexer/common/error.hpp"

namespace blexer::wire {

std::string_view to_string(ConnPhase p) noexcept {
  switch (p) {
    case ConnPhase::AwaitHello: return "AWAIT_HELLO";
    case ConnPhase::Active: return "ACTIVE";
    case ConnPhase::Closed: return "CLOSED";
  }
  return "?";
}

namespace {

[[noreturn]] void violation(const std::string& what) {
  throw Error(Errc::ProtocolViolation, "msg_type", what);
}

void track_seq(ConnState& s, std::uint64_t seq) {
  if (s.last_seq) {
    if (seq <= *s.last_seq) violation("seq " + std::to_string(seq) + " does not increase");
    s.seq_gaps += seq - *s.last_seq - 1;
  }
  s.last_seq = seq;
}

}  // namespace

StepResult handshake_step(const ConnState& state, const Envelope& msg, TimeMs now,
                          std::string_view session_id) {
  const MsgType type = msg.type();
  ConnState next = state;
  switch (state.phase) {
    case ConnPhase::Closed:
      violation("connection is closed");
    case ConnPhase::AwaitHello: {
      if (type != MsgType::Hello)
        violation(std::string(to_string(type)) + " before HELLO");
      const auto& hello = std::get<HelloMsg>(msg.payload);
      if (hello.protocol_version != kProtocolVersion)
        violation("protocol version " + std::to_string(hello.protocol_version) + " not supported");
      track_seq(next, msg.seq);
      next.phase = ConnPhase::Active;
      next.peer = hello;
      next.last_heartbeat = now;
      AckMsg ack{kProtocolVersion, std::string(session_id)};
      Envelope reply = stamp_outbound(next, ack, now);
      return {std::move(next), std::move(reply)};
    }
    case ConnPhase::Active: {
      if (type == MsgType::Hello) violation("duplicate HELLO");
      if (type == MsgType::Ack) violation("unexpected ACK");
      track_seq(next, msg.seq);
      if (type == MsgType::Bye) {
        next.phase = ConnPhase::Closed;
        next.closed_by_peer = true;
        return {std::move(next), std::nullopt};
      }
      // Any traffic from a live peer counts as a sign of life.
      next.last_heartbeat = now;
      return {std::move(next), std::nullopt};
    }
  }
  violation("unreachable");
}

ConnState check_liveness(const ConnState& state, TimeMs now, TimeMs timeout) {
  if (state.phase != ConnPhase::Active) return state;
  if (now - state.last_heartbeat <= timeout) return state;
  ConnState next = state;
  next.phase = ConnPhase::Closed;
  next.closed_by_peer = false;
  return next;
}

Envelope stamp_outbound(ConnState& state, Payload payload, TimeMs now) {
  Envelope env;
  env.seq = state.next_out_seq++;
  env.sent_at = now < 0 ? 0 : now;
  env.payload = std::move(payload);
  return env;
}

}  // namespace blexer::wire
