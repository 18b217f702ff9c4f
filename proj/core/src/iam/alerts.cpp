#include "blexer/iam/alerts.hpp"

#include <cstdio>

namespace blexer::iam {

std::string_view to_string(AlertKind k) noexcept {
  switch (k) {
    case AlertKind::FatigueThreshold: return "FATIGUE_THRESHOLD";
    case AlertKind::Disconnect: return "DISCONNECT";
    case AlertKind::DataQuality: return "DATA_QUALITY";
  }
  return "?";
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Critical: return "critical";
  }
  return "?";
}

std::optional<AlertKind> parse_alert_kind(std::string_view s) noexcept {
  for (auto k : {AlertKind::FatigueThreshold, AlertKind::Disconnect, AlertKind::DataQuality})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::optional<Severity> parse_severity(std::string_view s) noexcept {
  for (auto v : {Severity::Info, Severity::Warning, Severity::Critical})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

Alert AlertEvaluator::make(AlertKind kind, Severity severity, TimeMs t, std::string detail) {
  Alert a;
  a.id = next_id_++;
  a.kind = kind;
  a.severity = severity;
  a.t = t;
  a.detail = std::move(detail);
  history_.push_back(a);
  return a;
}

std::optional<Alert> AlertEvaluator::evaluate(const cam::UserState& state, double fatigue_threshold) {
  const bool above = state.fatigue >= fatigue_threshold;
  if (above && !above_) crossing_pending_ = true;
  if (!above) crossing_pending_ = false;
  above_ = above;
  if (!crossing_pending_) return std::nullopt;
  if (last_fatigue_alert_ && state.t - *last_fatigue_alert_ < options_.rearm_ms) return std::nullopt;

  crossing_pending_ = false;
  last_fatigue_alert_ = state.t;
  char buf[96];
  std::snprintf(buf, sizeof buf, "fatigue %.2f >= threshold %.2f", state.fatigue, fatigue_threshold);
  return make(AlertKind::FatigueThreshold, Severity::Warning, state.t, buf);
}

std::optional<Alert> AlertEvaluator::connection_closed(const std::string& device, bool expected,
                                                       TimeMs t) {
  if (expected) return std::nullopt;
  return make(AlertKind::Disconnect, Severity::Warning, t, device + " connection lost");
}

Alert AlertEvaluator::data_quality(const std::string& detail, Severity severity, TimeMs t) {
  return make(AlertKind::DataQuality, severity, t, detail);
}

bool AlertEvaluator::acknowledge(std::uint64_t id) {
  for (auto& a : history_) {
    if (a.id == id) {
      a.acknowledged = true;
      return true;
    }
  }
  return false;
}

}  // namespace blexer::iam
