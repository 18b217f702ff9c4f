#include "blexer/simkit/physiology.hpp"

#include <algorithm>
#include <cmath>

namespace blexer::simkit {

namespace {

// Independent streams per device from one seed.
constexpr std::uint64_t kEcgSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kPpgSalt = 0xc2b2ae3d27d4eb4fULL;
constexpr std::uint64_t kAffectSalt = 0x165667b19e3779f9ULL;

constexpr double kMaxJerk = 0.95;

}  // namespace

SignalSynth::SignalSynth(std::uint64_t seed)
    : ecg_rng_(seed ^ kEcgSalt), ppg_rng_(seed ^ kPpgSalt), affect_rng_(seed ^ kAffectSalt) {}

double SignalSynth::draw_rr_ms(const PhysioTargets& t) {
  const double mean = 60000.0 / std::max(t.bpm, 1.0);
  const double sigma = t.rmssd_ms / std::sqrt(2.0);
  const double rr = sigma > 0.0 ? ecg_rng_.normal(mean, sigma) : mean;
  return std::max(rr, 250.0);
}

wire::EcgMsg SignalSynth::ecg(const PhysioTargets& t, TimeMs dt_ms) {
  wire::EcgMsg m;
  m.bpm = static_cast<int>(std::lround(t.bpm));
  if (next_rr_ms_ < 0.0) next_rr_ms_ = draw_rr_ms(t);
  beat_clock_ms_ += static_cast<double>(dt_ms);
  while (beat_clock_ms_ >= next_rr_ms_) {
    const auto raw = static_cast<std::uint32_t>(std::lround(next_rr_ms_ * 1.024));
    m.rr_raw.push_back(std::clamp<std::uint32_t>(raw, 1, 1u << 20));
    beat_clock_ms_ -= next_rr_ms_;
    next_rr_ms_ = draw_rr_ms(t);
  }
  return m;
}

wire::PpgMsg SignalSynth::ppg(const PhysioTargets& t) {
  wire::PpgMsg m;
  m.bpm = static_cast<int>(std::lround(t.bpm + ppg_rng_.normal()));
  m.confidence = std::clamp(t.confidence + ppg_rng_.normal(0.0, 2.0), 0.0, 100.0);

  // Alternating magnitude: squared second difference is 16 a^2, so the
  // smoothness 1/(1 + 10 * 16 a^2) comes out at 1 - jerk.
  const double jerk = std::clamp(t.jerk, 0.0, kMaxJerk);
  const double mean_sq = jerk / (10.0 * (1.0 - jerk));
  const double a = std::sqrt(mean_sq / 16.0);
  const double sign = (ppg_count_ % 2 == 0) ? 1.0 : -1.0;
  const double mag = 1.0 + sign * a + ppg_rng_.normal(0.0, 0.002);
  const double theta = 0.1 * static_cast<double>(ppg_count_++);
  const double lateral = 0.2;
  m.accel = {mag * lateral * std::sin(theta), mag * lateral * std::cos(theta),
             mag * std::sqrt(1.0 - lateral * lateral)};
  return m;
}

wire::SkelAffectMsg SignalSynth::affect(const PhysioTargets& t, TimeMs now, bool joints) {
  wire::SkelAffectMsg m;
  std::array<double, 7> p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    p[i] = t.affect_profile[i] * std::exp(0.35 * affect_rng_.normal());
    sum += p[i];
  }
  if (sum <= 0.0) {
    p = {0, 0, 0, 0, 0, 0, 1};
    sum = 1.0;
  }
  for (auto& v : p) v /= sum;
  m.emotion7 = p;
  m.face_detected = true;
  if (joints) {
    std::vector<Vec3> js(wire::kJointCount);
    const double sway = 0.02 * std::sin(static_cast<double>(now) / 1000.0);
    for (std::size_t i = 0; i < js.size(); ++i) {
      const double side = (i % 2 == 0) ? -1.0 : 1.0;
      js[i] = {sway + side * 0.01 * static_cast<double>(i % 5), 0.07 * static_cast<double>(i),
               affect_rng_.normal(0.0, 0.003)};
    }
    m.joints = std::move(js);
  }
  return m;
}

PhysioTargets targets_for_fatigue(double fatigue, double resting_bpm) {
  const double f = std::clamp(fatigue, 0.0, 1.0);
  PhysioTargets t;
  t.bpm = resting_bpm * (1.0 + 0.5 * f);
  t.rmssd_ms = 50.0 * (1.0 - f);
  t.jerk = f;
  const double g = 1.0 - f;
  t.affect_profile = {0.2 * f, 0.2 * f, 0.2 * f, 0.35 * g, 0.4 * f, 0.1 * g, 0.55 * g};
  t.confidence = 90.0;
  return t;
}

}  // namespace blexer::simkit
