#pragma once

#include <span>

#include "blexer/common/vec3.hpp"

namespace blexer::fusion {

// Root mean square of successive differences, divisor N-1 for N intervals.
// Error{TooFewIntervals} below two intervals.
double rmssd(std::span<const double> rr_ms);

// Sample standard deviation (divisor N-1). Error{TooFewIntervals}.
double sdnn(std::span<const double> rr_ms);

inline constexpr double kDefaultJerkGain = 10.0;

// 1 / (1 + gain * mean squared second difference of the magnitudes), one
// difference step per sample. 1.0 for constant or linear motion.
// Error{TooFewSamples} below three samples.
double motion_smoothness(std::span<const double> magnitudes, double gain = kDefaultJerkGain);
double motion_smoothness(std::span<const Vec3> accel, double gain = kDefaultJerkGain);

}  // namespace blexer::fusion
