#include "blexer/ipm/dda.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "blexer/cam/directive.hpp"

namespace blexer::ipm {

int dda_step(std::span<const double> success_history, int level, int cap, DdaBands bands) {
  cap = std::clamp(cap, cam::kMinDifficulty, cam::kMaxDifficulty);
  int next = level;
  if (!success_history.empty()) {
    const double mean = std::accumulate(success_history.begin(), success_history.end(), 0.0) /
                        static_cast<double>(success_history.size());
    if (mean > bands.high)
      next = level + 1;
    else if (mean < bands.low)
      next = level - 1;
  }
  return std::clamp(next, cam::kMinDifficulty, cap);
}

int dda_step(std::span<const PerformanceReport> history, int level, int cap, DdaBands bands) {
  std::vector<double> s;
  s.reserve(history.size());
  for (const auto& r : history) s.push_back(r.success_rate);
  return dda_step(std::span<const double>(s), level, cap, bands);
}

}  // namespace blexer::ipm
