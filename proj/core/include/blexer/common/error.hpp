#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blexer {

enum class Errc {
  MalformedJson,
  UnknownType,
  SchemaViolation,
  ProtocolViolation,
  NonPositiveInterval,
  WrongStream,
  StaleTimestamp,
  InvalidDistribution,
  EmptyWindow,
  TooFewIntervals,
  TooFewSamples,
  NoUsableData,
  BoundaryViolation,
  EmptyCategory,
  InfeasibleQuota,
  CorruptLog,
  StorageFull,
  InvalidOverride,
  NoActiveSession,
  InvalidConfig,
};

std::string_view to_string(Errc code) noexcept;

// Every recoverable failure in the library is reported with one of these.
// `field()` names the offending field, line, or parameter when there is one.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string field, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  Errc code_;
  std::string field_;
};

}  // namespace blexer
