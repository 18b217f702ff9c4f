#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blexer/cam/types.hpp"
#include "blexer/iam/types.hpp"

namespace blexer::iam {

struct AlertOptions {
  TimeMs rearm_ms = 60'000;
};

// Raises alerts and keeps their history. Fatigue alerts are edge-triggered:
// an upward crossing of the threshold fires once; a crossing that happens
// within the re-arm period of the previous alert fires when the period ends,
// provided fatigue is still above the threshold.
class AlertEvaluator {
 public:
  explicit AlertEvaluator(AlertOptions options = {}) : options_(options) {}

  std::optional<Alert> evaluate(const cam::UserState& state, double fatigue_threshold);
  // A device session closed. Expected closes (BYE, session over) raise nothing.
  std::optional<Alert> connection_closed(const std::string& device, bool expected, TimeMs t);
  Alert data_quality(const std::string& detail, Severity severity, TimeMs t);

  bool acknowledge(std::uint64_t id);
  const std::vector<Alert>& history() const { return history_; }

 private:
  Alert make(AlertKind kind, Severity severity, TimeMs t, std::string detail);

  AlertOptions options_;
  std::vector<Alert> history_;
  std::uint64_t next_id_ = 1;
  std::optional<TimeMs> last_fatigue_alert_;
  bool above_ = false;
  bool crossing_pending_ = false;
};

}  // namespace blexer::iam
