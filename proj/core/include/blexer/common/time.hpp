#pragma once

#include <chrono>
#include <cstdint>

namespace blexer {

// Milliseconds; either since the Unix epoch (wire/hub stamps) or since the
// start of a logical-clock run. The two are never mixed inside one engine.
using TimeMs = std::int64_t;

inline constexpr TimeMs kMillisPerSecond = 1000;

inline TimeMs wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace blexer
