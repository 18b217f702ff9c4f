#include "blexer/common/error.hpp"

#include <cstdio>

#include "blexer/common/event_log.hpp"
#include "blexer/common/hash.hpp"

namespace blexer {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedJson: return "MalformedJson";
    case Errc::UnknownType: return "UnknownType";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::ProtocolViolation: return "ProtocolViolation";
    case Errc::NonPositiveInterval: return "NonPositiveInterval";
    case Errc::WrongStream: return "WrongStream";
    case Errc::StaleTimestamp: return "StaleTimestamp";
    case Errc::InvalidDistribution: return "InvalidDistribution";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::TooFewIntervals: return "TooFewIntervals";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::NoUsableData: return "NoUsableData";
    case Errc::BoundaryViolation: return "BoundaryViolation";
    case Errc::EmptyCategory: return "EmptyCategory";
    case Errc::InfeasibleQuota: return "InfeasibleQuota";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::StorageFull: return "StorageFull";
    case Errc::InvalidOverride: return "InvalidOverride";
    case Errc::NoActiveSession: return "NoActiveSession";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {
std::string compose(Errc code, const std::string& field, const std::string& detail) {
  std::string msg(to_string(code));
  if (!field.empty()) msg += " [" + field + "]";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}
}  // namespace

Error::Error(Errc code, std::string field, const std::string& detail)
    : std::runtime_error(compose(code, field, detail)), code_(code), field_(std::move(field)) {}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string_view file_name(LogStream stream) noexcept {
  switch (stream) {
    case LogStream::Raw: return "raw.jsonl";
    case LogStream::Fused: return "fused.jsonl";
    case LogStream::States: return "states.jsonl";
    case LogStream::Directives: return "directives.jsonl";
    case LogStream::Reports: return "reports.jsonl";
    case LogStream::Alerts: return "alerts.jsonl";
    case LogStream::Overrides: return "overrides.jsonl";
  }
  return "unknown.jsonl";
}

}  // namespace blexer
