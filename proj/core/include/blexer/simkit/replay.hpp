#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/cam/directive.hpp"
#include "blexer/common/event_log.hpp"
#include "blexer/common/time.hpp"

namespace blexer::simkit {

struct ReplayOptions {
  // Wall-clock pacing: 1 = original, N = N times faster, 0 = no waiting.
  // Results never depend on it.
  double speed = 0.0;
  EventSink* sink = nullptr;
};

struct ReplayResult {
  std::vector<cam::Directive> directives;
  std::uint64_t directive_hash = 0;
  std::size_t inputs = 0;
  TimeMs ended_at = 0;
  bool empty = false;
};

// One logged input: its global order, the logical time it was applied and
// the stream it came from.
struct LoggedInput {
  std::uint64_t ord = 0;
  TimeMs at = 0;
  LogStream stream = LogStream::Raw;
  std::size_t line = 0;
  nlohmann::json record;
};

// Reads raw, reports and overrides logs merged by ord. Throws
// Error{CorruptLog} naming file and line.
std::vector<LoggedInput> read_inputs(const std::filesystem::path& dir);
std::vector<cam::Directive> read_directives(const std::filesystem::path& dir);

// Re-runs the recorded session through a fresh engine. An empty session is
// a no-op.
ReplayResult replay_session(const std::filesystem::path& dir, const ReplayOptions& options = {});

}  // namespace blexer::simkit
