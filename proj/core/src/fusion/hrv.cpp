#include "blexer/fusion/hrv.hpp"

#include <cmath>
#include <vector>

#include "blexer/common/error.hpp"

namespace blexer::fusion {

double rmssd(std::span<const double> rr_ms) {
  if (rr_ms.size() < 2) throw Error(Errc::TooFewIntervals, "rr_ms", "need at least 2 intervals");
  double sum_sq = 0.0;
  for (std::size_t i = 1; i < rr_ms.size(); ++i) {
    const double d = rr_ms[i] - rr_ms[i - 1];
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(rr_ms.size() - 1));
}

double sdnn(std::span<const double> rr_ms) {
  if (rr_ms.size() < 2) throw Error(Errc::TooFewIntervals, "rr_ms", "need at least 2 intervals");
  double mean = 0.0;
  for (double v : rr_ms) mean += v;
  mean /= static_cast<double>(rr_ms.size());
  double sum_sq = 0.0;
  for (double v : rr_ms) sum_sq += (v - mean) * (v - mean);
  return std::sqrt(sum_sq / static_cast<double>(rr_ms.size() - 1));
}

double motion_smoothness(std::span<const double> magnitudes, double gain) {
  if (magnitudes.size() < 3) throw Error(Errc::TooFewSamples, "accel", "need at least 3 samples");
  double sum_sq = 0.0;
  for (std::size_t i = 1; i + 1 < magnitudes.size(); ++i) {
    const double jerk = magnitudes[i + 1] - 2.0 * magnitudes[i] + magnitudes[i - 1];
    sum_sq += jerk * jerk;
  }
  const double mean_sq = sum_sq / static_cast<double>(magnitudes.size() - 2);
  return 1.0 / (1.0 + gain * mean_sq);
}

double motion_smoothness(std::span<const Vec3> accel, double gain) {
  std::vector<double> mags;
  mags.reserve(accel.size());
  for (const auto& a : accel) mags.push_back(a.magnitude());
  return motion_smoothness(mags, gain);
}

}  // namespace blexer::fusion
