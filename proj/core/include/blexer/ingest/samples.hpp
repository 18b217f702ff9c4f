#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "blexer/affect/affect.hpp"
#include "blexer/common/time.hpp"
#include "blexer/common/vec3.hpp"

namespace blexer::ingest {

enum class Stream { Ecg, Ppg, Affect };

std::string_view to_string(Stream s) noexcept;

struct EcgSample {
  std::uint64_t seq = 0;
  int bpm = 0;
  std::vector<std::uint32_t> rr_raw;  // as received
  std::vector<double> rr_ms;          // converted, artifacts removed
  std::size_t rr_dropped = 0;
  TimeMs device_ts = 0;
  TimeMs hub_ts = 0;
  bool operator==(const EcgSample&) const = default;
};

inline constexpr double kAccelLimitG = 16.0;

struct PpgSample {
  std::uint64_t seq = 0;
  int bpm = 0;
  Vec3 accel;  // Gs, each component clamped to +-16
  double confidence = 0.0;
  TimeMs device_ts = 0;
  TimeMs hub_ts = 0;
  bool operator==(const PpgSample&) const = default;
};

struct AffectSample {
  std::uint64_t seq = 0;
  std::optional<affect::Emotion7> emotion;  // as received
  std::optional<affect::Affect4> affect;    // set only when a face was detected
  bool has_joints = false;
  TimeMs device_ts = 0;
  TimeMs hub_ts = 0;
  bool operator==(const AffectSample&) const = default;
};

using Sample = std::variant<EcgSample, PpgSample, AffectSample>;

TimeMs hub_ts_of(const Sample& s);
Stream stream_of(const Sample& s);

}  // namespace blexer::ingest
