#pragma once

#include "blexer/cam/directive.hpp"

namespace blexer::ipm {

struct FeedbackSettings {
  double visual_cue_hz = 1.0;
  int audio_volume_tier = 2;  // 1..3
  int haptic_pulses = 1;      // per rep
  bool operator==(const FeedbackSettings&) const = default;
};

FeedbackSettings apply_feedback_intensity(cam::FeedbackIntensity level) noexcept;

}  // namespace blexer::ipm
