#pragma once

#include <deque>
#include <optional>

#include <nlohmann/json.hpp>

#include "blexer/affect/affect.hpp"
#include "blexer/fusion/frame.hpp"

namespace blexer::fusion {

struct FeatureWindow {
  std::optional<double> hrv_rmssd;  // ms, needs >= 2 fresh RR intervals
  std::optional<double> hrv_sdnn;   // ms
  std::optional<double> hr_mean;    // BPM
  std::optional<double> motion_smoothness;
  std::optional<double> motion_activity;  // mean |magnitude - mean magnitude|, Gs
  std::optional<affect::Affect4> affect_dist;
  std::optional<double> flatness;
  double window_span_s = 0.0;
  std::size_t rr_count = 0;
  // Freshness of each stream at the newest frame.
  bool ecg_fresh = false;
  bool ppg_fresh = false;
  bool affect_fresh = false;
  TimeMs t = 0;

  bool operator==(const FeatureWindow&) const = default;
};

nlohmann::json to_json(const FeatureWindow& w);

struct FeatureOptions {
  TimeMs window_ms = kFeatureWindowMs;
  double ppg_confidence_gate = kPpgConfidenceGate;
  double jerk_gain = 10.0;
};

// Computes features from non-stale data only. Error{NoUsableData} when no
// frame in the range has a fresh stream.
FeatureWindow extract_features(const std::deque<FusedFrame>& frames, const FeatureOptions& o = {});

// Keeps the trailing window of frames.
class FrameHistory {
 public:
  explicit FrameHistory(FeatureOptions o = {}) : options_(o) {}

  void push(FusedFrame f);
  FeatureWindow extract() const { return extract_features(frames_, options_); }
  const std::deque<FusedFrame>& frames() const { return frames_; }
  const FeatureOptions& options() const { return options_; }

 private:
  FeatureOptions options_;
  std::deque<FusedFrame> frames_;
};

}  // namespace blexer::fusion
