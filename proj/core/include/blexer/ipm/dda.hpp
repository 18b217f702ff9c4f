#pragma once

#include <span>

#include "blexer/ipm/report.hpp"

namespace blexer::ipm {

struct DdaBands {
  double high = 0.8;
  double low = 0.4;
};

// One micro-adjustment after a completed exercise. Mean success above
// bands.high steps up, below bands.low steps down; the result always lies in
// [1, cap]. An empty history only clamps.
int dda_step(std::span<const double> success_history, int level, int cap, DdaBands bands = {});
int dda_step(std::span<const PerformanceReport> history, int level, int cap, DdaBands bands = {});

}  // namespace blexer::ipm
