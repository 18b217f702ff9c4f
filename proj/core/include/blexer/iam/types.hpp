#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "blexer/cam/directive.hpp"
#include "blexer/common/time.hpp"

namespace blexer::iam {

enum class AlertKind { FatigueThreshold, Disconnect, DataQuality };
enum class Severity { Info, Warning, Critical };

std::string_view to_string(AlertKind k) noexcept;
std::string_view to_string(Severity s) noexcept;
std::optional<AlertKind> parse_alert_kind(std::string_view s) noexcept;
std::optional<Severity> parse_severity(std::string_view s) noexcept;

struct Alert {
  std::uint64_t id = 0;
  AlertKind kind = AlertKind::DataQuality;
  Severity severity = Severity::Info;
  TimeMs t = 0;
  std::string detail;
  bool acknowledged = false;

  bool operator==(const Alert&) const = default;
};

enum class OverrideKind { SetDifficulty, ForceRest, SwitchCategory, Pause, Resume };

std::string_view to_string(OverrideKind k) noexcept;
std::optional<OverrideKind> parse_override_kind(std::string_view s) noexcept;

// Therapist command. `level` is used by SET_DIFFICULTY, `category` by
// SWITCH_CATEGORY; the other kinds carry no value.
struct OverrideCommand {
  OverrideKind kind = OverrideKind::Pause;
  std::optional<int> level;
  std::optional<cam::TaskCategory> category;
  std::string issued_by;
  TimeMs t = 0;

  bool operator==(const OverrideCommand&) const = default;
};

}  // namespace blexer::iam
