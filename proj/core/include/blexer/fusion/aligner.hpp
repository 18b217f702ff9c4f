#pragma once

#include <optional>
#include <vector>

#include "blexer/affect/affect.hpp"
#include "blexer/fusion/frame.hpp"
#include "blexer/ingest/samples.hpp"

namespace blexer::fusion {

// Sample-and-hold alignment of the sensor streams onto the frame clock.
// Output depends only on the sequence of ingest()/tick() calls.
class Aligner {
 public:
  explicit Aligner(TimeMs affect_window_ms = 5000) : affect_window_(affect_window_ms) {}

  void ingest(const ingest::Sample& sample);

  // Produces the frame for tick time t. t should not precede the hub stamp
  // of any sample already ingested; staleness is clamped at zero if it does.
  FusedFrame tick(TimeMs t);

 private:
  struct EcgHold {
    int bpm = 0;
    TimeMs at = 0;
  };
  struct PpgHold {
    int bpm = 0;
    Vec3 accel;
    double confidence = 0.0;
    TimeMs at = 0;
  };

  std::optional<EcgHold> ecg_;
  std::optional<PpgHold> ppg_;
  std::optional<TimeMs> affect_at_;
  affect::AffectWindow affect_window_;
  std::vector<double> pending_rr_;
  bool ppg_updated_ = false;
};

}  // namespace blexer::fusion
