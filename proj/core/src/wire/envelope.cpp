#include "blexer/wire/envelope.hpp"

#include <array>
#include <utility>

namespace blexer::wire {

namespace {

constexpr std::array<std::pair<MsgType, std::string_view>, 11> kMsgNames{{
    {MsgType::Hello, "HELLO"},
    {MsgType::Ack, "ACK"},
    {MsgType::Ecg, "ECG"},
    {MsgType::Ppg, "PPG"},
    {MsgType::SkelAffect, "SKEL_AFFECT"},
    {MsgType::Directive, "DIRECTIVE"},
    {MsgType::PerfReport, "PERF_REPORT"},
    {MsgType::Override, "OVERRIDE"},
    {MsgType::Alert, "ALERT"},
    {MsgType::Heartbeat, "HEARTBEAT"},
    {MsgType::Bye, "BYE"},
}};

constexpr std::array<std::pair<DeviceType, std::string_view>, 5> kDeviceNames{{
    {DeviceType::EcgChest, "ECG_CHEST"},
    {DeviceType::PpgWrist, "PPG_WRIST"},
    {DeviceType::Mocap, "MOCAP"},
    {DeviceType::Game, "GAME"},
    {DeviceType::Dashboard, "DASHBOARD"},
}};

}  // namespace

std::string_view to_string(MsgType t) noexcept {
  for (const auto& [k, v] : kMsgNames)
    if (k == t) return v;
  return "?";
}

std::string_view to_string(DeviceType d) noexcept {
  for (const auto& [k, v] : kDeviceNames)
    if (k == d) return v;
  return "?";
}

std::optional<MsgType> parse_msg_type(std::string_view s) noexcept {
  for (const auto& [k, v] : kMsgNames)
    if (v == s) return k;
  return std::nullopt;
}

std::optional<DeviceType> parse_device_type(std::string_view s) noexcept {
  for (const auto& [k, v] : kDeviceNames)
    if (v == s) return k;
  return std::nullopt;
}

bool is_data(MsgType t) noexcept {
  switch (t) {
    case MsgType::Hello:
    case MsgType::Ack:
    case MsgType::Heartbeat:
    case MsgType::Bye:
      return false;
    default:
      return true;
  }
}

}  // namespace blexer::wire
