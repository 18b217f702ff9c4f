#include "blexer/runtime/config.hpp"

#include <cstdlib>
#include <fstream>

#include "blexer/common/error.hpp"

namespace blexer::runtime {

using nlohmann::json;

namespace {

std::uint16_t parse_port(const std::string& field, long long v) {
  if (v < 0 || v > 65535) throw Error(Errc::InvalidConfig, field, "port outside [0,65535]");
  return static_cast<std::uint16_t>(v);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, key, e.what());
  }
}

void read_port(const json& j, const char* key, std::uint16_t& out) {
  long long v = out;
  read(j, key, v);
  out = parse_port(key, v);
}

void read_path(const json& j, const char* key, std::optional<std::filesystem::path>& out) {
  std::string s;
  read(j, key, s);
  if (!s.empty()) out = s;
}

}  // namespace

HubConfig hub_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "config", "expected object");
  HubConfig c;
  read(j, "bind_address", c.bind_address);
  read_port(j, "port_ecg", c.port_ecg);
  read_port(j, "port_ppg", c.port_ppg);
  read_port(j, "port_game", c.port_game);
  read_port(j, "port_skel", c.port_skel);
  read_port(j, "http_port", c.http_port);
  std::string dir = c.sessions_dir.string();
  read(j, "sessions_dir", dir);
  c.sessions_dir = dir;
  read_path(j, "plan_file", c.plan_file);
  read_path(j, "rules_file", c.rules_file);
  read_path(j, "catalog_file", c.catalog_file);
  read(j, "session_id", c.session_id);
  read(j, "queue_capacity", c.queue_capacity);
  read(j, "ws_buffer", c.ws_buffer);
  read(j, "heartbeat_timeout_ms", c.heartbeat_timeout_ms);
  read(j, "record", c.record);
  if (c.queue_capacity == 0) throw Error(Errc::InvalidConfig, "queue_capacity", "must be positive");
  if (c.ws_buffer == 0) throw Error(Errc::InvalidConfig, "ws_buffer", "must be positive");
  if (c.heartbeat_timeout_ms <= 0)
    throw Error(Errc::InvalidConfig, "heartbeat_timeout_ms", "must be positive");
  return c;
}

HubConfig load_hub_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, path.string(), "cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidConfig, path.string(), e.what());
  }
  return hub_config_from_json(j);
}

json to_json(const HubConfig& c) {
  auto opt = [](const std::optional<std::filesystem::path>& p) {
    return p ? json(p->string()) : json();
  };
  return {{"bind_address", c.bind_address},
          {"port_ecg", c.port_ecg},
          {"port_ppg", c.port_ppg},
          {"port_game", c.port_game},
          {"port_skel", c.port_skel},
          {"http_port", c.http_port},
          {"sessions_dir", c.sessions_dir.string()},
          {"plan_file", opt(c.plan_file)},
          {"rules_file", opt(c.rules_file)},
          {"catalog_file", opt(c.catalog_file)},
          {"session_id", c.session_id},
          {"queue_capacity", c.queue_capacity},
          {"ws_buffer", c.ws_buffer},
          {"heartbeat_timeout_ms", c.heartbeat_timeout_ms},
          {"record", c.record}};
}

void apply_env(HubConfig& c, const EnvLookup& lookup) {
  auto port = [&](const char* name, std::uint16_t& out) {
    auto v = lookup(name);
    if (!v) return;
    try {
      std::size_t used = 0;
      const long long n = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing characters");
      out = parse_port(name, n);
    } catch (const std::logic_error&) {
      throw Error(Errc::InvalidConfig, name, "not a port number: '" + *v + "'");
    }
  };
  port("BLEXER_PORT_ECG", c.port_ecg);
  port("BLEXER_PORT_PPG", c.port_ppg);
  port("BLEXER_PORT_GAME", c.port_game);
  port("BLEXER_PORT_SKEL", c.port_skel);
  port("BLEXER_HTTP_PORT", c.http_port);
  if (auto d = lookup("BLEXER_SESSIONS_DIR")) c.sessions_dir = *d;
}

void apply_env(HubConfig& c) {
  apply_env(c, [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

}  // namespace blexer::runtime
