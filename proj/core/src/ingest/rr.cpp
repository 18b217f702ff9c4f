#include "blexer/ingest/rr.hpp"

#include <cmath>

#include "blexer/common/error.hpp"

namespace blexer::ingest {

double rr_to_ms(std::uint32_t raw) {
  if (raw == 0) throw Error(Errc::NonPositiveInterval, "rr_raw", "interval must be > 0");
  // raw * 1000 / 1024 == raw * 125 / 128; both steps are exact in binary64.
  return static_cast<double>(raw) * 125.0 / 128.0;
}

ArtifactResult reject_artifacts(std::span<const double> rr_ms, const ArtifactRule& rule,
                                std::optional<double> reference) {
  ArtifactResult out;
  out.kept.reserve(rr_ms.size());
  std::optional<double> prev = reference;
  for (double rr : rr_ms) {
    const bool in_range = std::isfinite(rr) && rr >= rule.min_ms && rr <= rule.max_ms;
    const bool jump = in_range && prev && std::abs(rr - *prev) > rule.max_jump * *prev;
    if (!in_range || jump) {
      ++out.dropped;
      continue;
    }
    out.kept.push_back(rr);
    prev = rr;
  }
  return out;
}

}  // namespace blexer::ingest
