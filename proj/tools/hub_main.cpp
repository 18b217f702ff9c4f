#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "blexer/common/error.hpp"
#include "blexer/net/hub.hpp"
#include "blexer/runtime/config.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blexer-hub: sensor hub, decision loop and dashboard API"};
  std::string config_file;
  std::optional<std::uint16_t> ecg, ppg, game, skel, http;
  std::optional<std::string> sessions_dir, plan, rules, session_id, bind;
  double duration_s = 0.0;
  bool no_record = false;
  app.add_option("-c,--config", config_file, "hub configuration JSON");
  app.add_option("--bind", bind, "listen address");
  app.add_option("--port-ecg", ecg);
  app.add_option("--port-ppg", ppg);
  app.add_option("--port-game", game);
  app.add_option("--port-skel", skel, "UDP");
  app.add_option("--http-port", http);
  app.add_option("--sessions-dir", sessions_dir);
  app.add_option("--plan", plan, "therapy plan JSON");
  app.add_option("--rules", rules, "rule config JSON");
  app.add_option("--session-id", session_id);
  app.add_option("--duration", duration_s, "stop after this many seconds (0: until SIGINT)");
  app.add_flag("--no-record", no_record, "do not write session logs");
  CLI11_PARSE(app, argc, argv);

  blexer::runtime::HubConfig cfg;
  try {
    if (!config_file.empty()) cfg = blexer::runtime::load_hub_config(config_file);
    blexer::runtime::apply_env(cfg);
  } catch (const blexer::Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }
  // Command-line flags win over the file and the environment.
  if (bind) cfg.bind_address = *bind;
  if (ecg) cfg.port_ecg = *ecg;
  if (ppg) cfg.port_ppg = *ppg;
  if (game) cfg.port_game = *game;
  if (skel) cfg.port_skel = *skel;
  if (http) cfg.http_port = *http;
  if (sessions_dir) cfg.sessions_dir = *sessions_dir;
  if (plan) cfg.plan_file = *plan;
  if (rules) cfg.rules_file = *rules;
  if (session_id) cfg.session_id = *session_id;
  if (no_record) cfg.record = false;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  blexer::net::Hub hub(cfg);
  try {
    hub.start();
  } catch (const std::exception& e) {
    std::cerr << "start: " << e.what() << "\n";
    return 1;
  }
  std::cout << "session " << hub.session_id() << "\n"
            << "ecg " << hub.port_ecg() << " ppg " << hub.port_ppg() << " game "
            << hub.port_game() << " skel/udp " << hub.port_skel() << " http "
            << hub.http_port() << std::endl;

  const auto started = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    if (duration_s > 0 &&
        std::chrono::steady_clock::now() - started >= std::chrono::duration<double>(duration_s))
      break;
  }
  hub.stop();
  const auto l = hub.latency();
  std::cout << "stopped; latency p50 " << l.p50_ms << " ms p95 " << l.p95_ms << " ms over "
            << l.count << " samples" << std::endl;
  return 0;
}
