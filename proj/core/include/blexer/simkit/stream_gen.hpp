#pragma once

#include <cstdint>
#include <vector>

#include "blexer/common/time.hpp"
#include "blexer/simkit/scenario.hpp"
#include "blexer/wire/envelope.hpp"

namespace blexer::simkit {

struct TimedEnvelope {
  TimeMs t = 0;
  wire::DeviceType device = wire::DeviceType::EcgChest;
  wire::Envelope env;
};

struct StreamOptions {
  TimeMs start_ms = 0;
  bool control = true;  // HELLO first and BYE last on each device
  bool joints = true;
};

inline constexpr TimeMs kEcgPeriodMs = 1000;
inline constexpr TimeMs kPpgPeriodMs = 1000;
inline constexpr TimeMs kAffectPeriodMs = 200;

// Envelopes of the three sensor devices ordered by time (ties: ECG, PPG,
// affect). A pure function of (script, seed, options).
std::vector<TimedEnvelope> generate_stream(const ScenarioScript& script, const StreamOptions& o = {});

// FNV-1a over the encoded lines, device and time included.
std::uint64_t stream_hash(const std::vector<TimedEnvelope>& stream);

}  // namespace blexer::simkit
