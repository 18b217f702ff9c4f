#include "blexer/ipm/feedback.hpp"

namespace blexer::ipm {

FeedbackSettings apply_feedback_intensity(cam::FeedbackIntensity level) noexcept {
  switch (level) {
    case cam::FeedbackIntensity::Low:
      return {0.5, 1, 0};
    case cam::FeedbackIntensity::Medium:
      return {1.0, 2, 1};
    case cam::FeedbackIntensity::High:
      return {2.0, 3, 3};
  }
  return {};
}

}  // namespace blexer::ipm
