#pragma once

#include <cstdint>
#include <optional>

#include "blexer/common/time.hpp"
#include "blexer/wire/envelope.hpp"

namespace blexer::wire {

inline constexpr TimeMs kHeartbeatIntervalMs = 1000;
inline constexpr TimeMs kHeartbeatTimeoutMs = 5000;

enum class ConnPhase { AwaitHello, Active, Closed };

std::string_view to_string(ConnPhase p) noexcept;

// Per-connection protocol state. Owned by exactly one connection handler.
struct ConnState {
  ConnPhase phase = ConnPhase::AwaitHello;
  TimeMs last_heartbeat = 0;
  std::optional<HelloMsg> peer;
  std::optional<std::uint64_t> last_seq;
  std::uint64_t seq_gaps = 0;        // messages missing according to seq
  std::uint64_t next_out_seq = 1;    // seq for the next message we send
  bool closed_by_peer = false;       // CLOSED reached through BYE
};

struct StepResult {
  ConnState state;
  std::optional<Envelope> reply;
};

// Advances the connection state machine by one inbound message.
//   AWAIT_HELLO + HELLO(v1)  -> ACTIVE, reply ACK
//   ACTIVE + HEARTBEAT|data  -> ACTIVE (liveness refreshed)
//   ACTIVE + BYE             -> CLOSED
// Throws Error{ProtocolViolation} for anything else: data or control before
// HELLO, duplicate HELLO, version mismatch, non-increasing seq, or any
// message after CLOSED. The caller's state is untouched on error.
StepResult handshake_step(const ConnState& state, const Envelope& msg, TimeMs now,
                          std::string_view session_id = {});

// ACTIVE connections silent for longer than `timeout` become CLOSED.
ConnState check_liveness(const ConnState& state, TimeMs now,
                         TimeMs timeout = kHeartbeatTimeoutMs);

// Stamps the next outbound seq on `msg` and advances the counter.
Envelope stamp_outbound(ConnState& state, Payload payload, TimeMs now);

}  // namespace blexer::wire
