#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blexer/cam/directive.hpp"
#include "blexer/common/time.hpp"
#include "blexer/common/vec3.hpp"
#include "blexer/iam/types.hpp"
#include "blexer/ipm/report.hpp"

namespace blexer::wire {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

// Order matches the Payload variant below; the variant index is the type tag.
enum class MsgType {
  Hello,
  Ack,
  Ecg,
  Ppg,
  SkelAffect,
  Directive,
  PerfReport,
  Override,
  Alert,
  Heartbeat,
  Bye,
};

enum class DeviceType { EcgChest, PpgWrist, Mocap, Game, Dashboard };

std::string_view to_string(MsgType t) noexcept;
std::string_view to_string(DeviceType d) noexcept;
std::optional<MsgType> parse_msg_type(std::string_view s) noexcept;
std::optional<DeviceType> parse_device_type(std::string_view s) noexcept;

struct HelloMsg {
  DeviceType device_type = DeviceType::EcgChest;
  int protocol_version = kProtocolVersion;
  std::set<std::string> capabilities;
  bool operator==(const HelloMsg&) const = default;
};

struct AckMsg {
  int protocol_version = kProtocolVersion;
  std::string session_id;
  bool operator==(const AckMsg&) const = default;
};

struct EcgMsg {
  int bpm = 0;
  std::vector<std::uint32_t> rr_raw;  // 1/1024 s units
  bool operator==(const EcgMsg&) const = default;
};

struct PpgMsg {
  int bpm = 0;
  Vec3 accel;               // Gs
  double confidence = 0.0;  // 0..100
  bool operator==(const PpgMsg&) const = default;
};

inline constexpr std::size_t kJointCount = 25;

struct SkelAffectMsg {
  std::optional<std::vector<Vec3>> joints;
  // anger, disgust, fear, happiness, sadness, surprise, neutral
  std::optional<std::array<double, 7>> emotion7;
  // Absent means the capture host sent no affect this frame.
  std::optional<bool> face_detected;
  bool operator==(const SkelAffectMsg&) const = default;
};

struct HeartbeatMsg {
  bool operator==(const HeartbeatMsg&) const = default;
};

struct ByeMsg {
  std::string reason;
  bool operator==(const ByeMsg&) const = default;
};

using Payload = std::variant<HelloMsg, AckMsg, EcgMsg, PpgMsg, SkelAffectMsg, cam::Directive,
                             ipm::PerformanceReport, iam::OverrideCommand, iam::Alert,
                             HeartbeatMsg, ByeMsg>;

// The message type is the payload alternative, so a type/payload mismatch
// cannot be constructed.
struct Envelope {
  std::uint64_t seq = 0;
  TimeMs sent_at = 0;
  Payload payload;

  MsgType type() const noexcept { return static_cast<MsgType>(payload.index()); }
  bool operator==(const Envelope&) const = default;
};

// HELLO/ACK/HEARTBEAT/BYE control the connection; everything else is data.
bool is_data(MsgType t) noexcept;

}  // namespace blexer::wire
