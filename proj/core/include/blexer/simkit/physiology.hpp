#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "blexer/common/rng.hpp"
#include "blexer/common/time.hpp"
#include "blexer/wire/envelope.hpp"

namespace blexer::simkit {

// Instantaneous targets for the synthetic sensors.
struct PhysioTargets {
  double bpm = 70.0;
  double rmssd_ms = 40.0;
  std::array<double, 7> affect_profile{0.02, 0.01, 0.02, 0.25, 0.05, 0.05, 0.60};
  double jerk = 0.05;  // 0 smooth .. 1 jerky; sets the motion smoothness to 1 - jerk
  double confidence = 90.0;
};

inline constexpr double kRrUnitsPerMinute = 61440.0;  // 60 s * 1024 units/s

// Turns targets into device messages. Each stream draws from its own seeded
// generator, so the three streams are independent of each other's rates.
class SignalSynth {
 public:
  explicit SignalSynth(std::uint64_t seed);

  // RR intervals of the beats completed in the last `dt_ms`.
  wire::EcgMsg ecg(const PhysioTargets& t, TimeMs dt_ms = 1000);
  wire::PpgMsg ppg(const PhysioTargets& t);
  wire::SkelAffectMsg affect(const PhysioTargets& t, TimeMs now, bool joints = true);

 private:
  double draw_rr_ms(const PhysioTargets& t);

  Rng ecg_rng_;
  Rng ppg_rng_;
  Rng affect_rng_;
  double beat_clock_ms_ = 0.0;
  double next_rr_ms_ = -1.0;
  std::uint64_t ppg_count_ = 0;
};

// Closed-loop coupling: targets for a player at fatigue f, chosen so each
// fatigue term the inference reads sits near f.
PhysioTargets targets_for_fatigue(double fatigue, double resting_bpm = 65.0);

}  // namespace blexer::simkit
