#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace blexer {

// The typed JSONL streams that make up a recorded session.
enum class LogStream { Raw, Fused, States, Directives, Reports, Alerts, Overrides };

std::string_view file_name(LogStream stream) noexcept;

// Append-only sink for session events. Implementations must tolerate being
// called from the single thread that owns the producing component.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void append(LogStream stream, const nlohmann::json& record) = 0;
};

}  // namespace blexer
