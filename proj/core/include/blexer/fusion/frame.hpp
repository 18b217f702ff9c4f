#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/affect/affect.hpp"
#include "blexer/common/time.hpp"
#include "blexer/common/vec3.hpp"

namespace blexer::fusion {

inline constexpr TimeMs kFramePeriodMs = 100;      // 10 Hz
inline constexpr TimeMs kStaleAfterMs = 2000;
inline constexpr TimeMs kFeatureWindowMs = 30'000;
inline constexpr double kPpgConfidenceGate = 50.0;

struct StreamStatus {
  std::optional<TimeMs> staleness_ms;  // absent: never seen
  bool stale = true;
  bool operator==(const StreamStatus&) const = default;
};

// Time-aligned snapshot: the latest value of each stream held at tick t.
struct FusedFrame {
  TimeMs t = 0;
  std::optional<int> bpm_ecg;
  std::optional<int> bpm_ppg;
  std::optional<double> ppg_confidence;
  std::vector<double> rr_recent;  // RR (ms) that arrived since the previous frame
  std::optional<Vec3> accel;
  bool accel_updated = false;  // a new PPG sample arrived since the previous frame
  std::optional<affect::Affect4> affect;  // smoothed over the affect window
  StreamStatus ecg;
  StreamStatus ppg;
  StreamStatus affect_status;

  bool any_fresh() const { return !ecg.stale || !ppg.stale || !affect_status.stale; }
  bool operator==(const FusedFrame&) const = default;
};

nlohmann::json to_json(const FusedFrame& f);

}  // namespace blexer::fusion
