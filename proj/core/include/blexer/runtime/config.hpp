#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "blexer/common/time.hpp"

namespace blexer::runtime {

struct HubConfig {
  std::string bind_address = "0.0.0.0";
  std::uint16_t port_ecg = 9101;
  std::uint16_t port_ppg = 9102;
  std::uint16_t port_game = 9103;
  std::uint16_t port_skel = 9104;  // UDP
  std::uint16_t http_port = 8080;
  std::filesystem::path sessions_dir = "sessions";
  std::optional<std::filesystem::path> plan_file;
  std::optional<std::filesystem::path> rules_file;
  std::optional<std::filesystem::path> catalog_file;
  std::string session_id;  // empty: derived from the start time
  std::size_t queue_capacity = 4096;
  std::size_t ws_buffer = 256;  // per-subscriber events before drop-oldest
  TimeMs heartbeat_timeout_ms = 5000;
  bool record = true;
};

// Missing keys keep defaults. Throws Error{InvalidConfig}.
HubConfig hub_config_from_json(const nlohmann::json& j);
HubConfig load_hub_config(const std::filesystem::path& path);
nlohmann::json to_json(const HubConfig& c);

// Applies BLEXER_PORT_ECG, BLEXER_PORT_PPG, BLEXER_PORT_GAME,
// BLEXER_PORT_SKEL, BLEXER_HTTP_PORT and BLEXER_SESSIONS_DIR.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
void apply_env(HubConfig& c, const EnvLookup& lookup);
void apply_env(HubConfig& c);

}  // namespace blexer::runtime
