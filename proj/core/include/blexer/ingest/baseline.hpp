#pragma once

#include <optional>

#include "blexer/common/time.hpp"

namespace blexer::ingest {

inline constexpr TimeMs kCalibrationMs = 60'000;

struct Baseline {
  double resting_bpm = 0.0;
  double calib_duration_s = 0.0;
  bool complete = false;
  bool operator==(const Baseline&) const = default;
};

// Mean resting BPM over the first 60 s of a session, frozen afterwards.
class BaselineTracker {
 public:
  // Returns the baseline after taking `bpm` observed at hub time `t`.
  // Zero BPM (no contact) is ignored.
  const Baseline& update(int bpm, TimeMs t);

  // Completes calibration once 60 s have elapsed even without a new sample.
  const Baseline& tick(TimeMs t);

  const Baseline& current() const { return baseline_; }

 private:
  Baseline baseline_;
  std::optional<TimeMs> start_;
  double sum_ = 0.0;
  long count_ = 0;
};

}  // namespace blexer::ingest
