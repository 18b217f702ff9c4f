#pragma once

#include <string>

#include "blexer/cam/directive.hpp"
#include "blexer/common/time.hpp"

namespace blexer::ipm {

// Per-exercise feedback from the play module back to CAM.
struct PerformanceReport {
  std::string exercise_id;
  cam::TaskCategory category = cam::TaskCategory::Coordination;
  double success_rate = 0.0;
  double completion_time_s = 0.0;
  int errors = 0;
  int reps_done = 0;
  TimeMs ended_at = 0;
  bool incomplete = false;  // abandoned or cut short by a rest
  bool fallback = false;    // requested category was empty; another was used

  bool operator==(const PerformanceReport&) const = default;
};

}  // namespace blexer::ipm
