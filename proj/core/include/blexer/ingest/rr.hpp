#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace blexer::ingest {

// RR interval from 1/1024 s device units to milliseconds. The result is
// raw * 125 / 128, a dyadic rational, so it is exact in a double for every
// raw below 2^45. Throws Error{NonPositiveInterval} for raw == 0.
double rr_to_ms(std::uint32_t raw);

struct ArtifactRule {
  double min_ms = 300.0;
  double max_ms = 2000.0;
  double max_jump = 0.25;  // relative to the previous kept interval
};

struct ArtifactResult {
  std::vector<double> kept;
  std::size_t dropped = 0;
  bool operator==(const ArtifactResult&) const = default;
};

// Drops intervals outside [min_ms, max_ms] or differing from the previous
// kept interval by more than max_jump (relative). `reference` seeds the
// previous kept interval, e.g. with the last interval of an earlier packet.
ArtifactResult reject_artifacts(std::span<const double> rr_ms, const ArtifactRule& rule = {},
                                std::optional<double> reference = std::nullopt);

}  // namespace blexer::ingest
