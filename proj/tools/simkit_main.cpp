#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blexer/cam/config_io.hpp"
#include "blexer/common/error.hpp"
#include "blexer/common/hash.hpp"
#include "blexer/ipm/catalog.hpp"
#include "blexer/ipm/pcg.hpp"
#include "blexer/net/client.hpp"
#include "blexer/runtime/config.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/simkit/closed_loop.hpp"
#include "blexer/simkit/replay.hpp"
#include "blexer/simkit/scenario.hpp"
#include "blexer/simkit/stream_gen.hpp"
#include "blexer/wire/codec.hpp"

using json = nlohmann::json;
namespace bs = blexer::simkit;

namespace {

std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }

double parse_speed(const std::string& s) {
  std::string v = s;
  if (!v.empty() && (v[0] == 'x' || v[0] == 'X')) v = v.substr(1);
  if (!v.empty() && (v.back() == 'x' || v.back() == 'X')) v.pop_back();
  const double speed = std::stod(v);
  if (speed < 0) throw std::invalid_argument("negative speed");
  return speed;
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simkit: scenario streams, reference player, replay and offline simulation"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "stream a scenario to a hub");
  std::string scenario = "steady-exercise";
  std::uint64_t seed = 1;
  std::string host = "127.0.0.1";
  std::string speed_arg = "1";
  blexer::runtime::HubConfig ports;
  blexer::runtime::apply_env(ports);
  run->add_option("--scenario", scenario, "bundled name or JSON file");
  run->add_option("--seed", seed);
  run->add_option("--host", host);
  run->add_option("--speed", speed_arg, "pacing factor, e.g. x10");
  run->add_option("--port-ecg", ports.port_ecg);
  run->add_option("--port-ppg", ports.port_ppg);
  run->add_option("--port-skel", ports.port_skel);

  // replay
  auto* replay = app.add_subcommand("replay", "re-run a recorded session and compare directives");
  std::string session_dir;
  replay->add_option("session_dir", session_dir)->required();
  replay->add_option("--speed", speed_arg, "pacing factor; 0 runs as fast as possible");

  // player
  auto* player = app.add_subcommand("player", "reference game client on the GAME port");
  double skill = 5.0;
  double duration_s = 0.0;
  std::string catalog_file;
  bool use_sequence = false;
  player->add_option("--skill", skill);
  player->add_option("--seed", seed);
  player->add_option("--host", host);
  player->add_option("--port", ports.port_game);
  player->add_option("--duration", duration_s, "seconds (0: until the hub leaves or SIGINT)");
  player->add_option("--catalog", catalog_file, "exercise catalog JSON");
  player->add_flag("--sequence", use_sequence, "order exercises by a procedural sequence");

  // closed-loop
  auto* loop = app.add_subcommand("closed-loop", "offline closed-loop simulation on a logical clock");
  std::string record_dir;
  std::string loop_scenario;
  double overrides_per_min = 0.0;
  double loop_duration_s = 600.0;
  loop->add_option("--seed", seed);
  loop->add_option("--skill", skill);
  loop->add_option("--duration", loop_duration_s, "seconds");
  loop->add_option("--scenario", loop_scenario, "scripted sensors instead of the coupled physiology");
  loop->add_option("--record", record_dir, "write session logs to this directory");
  loop->add_option("--random-overrides", overrides_per_min, "operator commands per minute");

  // generate
  auto* gen = app.add_subcommand("generate", "print a scenario stream as NDJSON");
  std::string out_file;
  gen->add_option("--scenario", scenario);
  gen->add_option("--seed", seed);
  gen->add_option("-o,--out", out_file);

  // defaults
  auto* defaults = app.add_subcommand("defaults", "write the default plan, rules, catalog and scenarios");
  std::string defaults_dir = "data";
  defaults->add_option("dir", defaults_dir);

  CLI11_PARSE(app, argc, argv);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    if (*run) {
      const auto script = bs::load_scenario(scenario, seed);
      const auto stream = bs::generate_stream(script);
      blexer::net::FeedTargets to{host, ports.port_ecg, ports.port_ppg, ports.port_skel};
      const double speed = parse_speed(speed_arg);
      std::cout << "streaming " << script.name << " (" << stream.size() << " envelopes, hash "
                << blexer::hex64(bs::stream_hash(stream)) << ")" << std::endl;
      const auto st = blexer::net::feed_stream(stream, to, speed > 0 ? speed : 1.0, &g_stop);
      std::cout << "sent " << st.data_sent << " data envelopes on " << st.devices << " links\n";
      return 0;
    }

    if (*replay) {
      bs::ReplayOptions ro;
      ro.speed = parse_speed(speed_arg);
      const auto result = bs::replay_session(session_dir, ro);
      if (result.empty) {
        std::cout << "empty session; nothing to replay\n";
        return 0;
      }
      const auto recorded = bs::read_directives(session_dir);
      const auto recorded_hash = blexer::runtime::directive_sequence_hash(recorded);
      const bool same = recorded_hash == result.directive_hash;
      std::cout << "inputs " << result.inputs << " directives " << result.directives.size()
                << " (recorded " << recorded.size() << ")\n"
                << "replay hash " << blexer::hex64(result.directive_hash) << " recorded hash "
                << blexer::hex64(recorded_hash) << (same ? " MATCH" : " MISMATCH") << "\n";
      return same ? 0 : 1;
    }

    if (*player) {
      blexer::cam::TherapyPlan plan;
      blexer::ipm::Catalog catalog =
          catalog_file.empty() ? blexer::ipm::default_catalog() : blexer::ipm::load_catalog(catalog_file);
      blexer::ipm::ControllerOptions copts;
      copts.preference = plan.preferences;
      copts.excluded = plan.excluded_exercises;
      if (use_sequence) copts.sequence = blexer::ipm::pcg_sequence(plan, catalog, seed);
      bs::PlayerModel model;
      model.skill = skill;
      bs::PlayerDriver driver(catalog, copts, model, seed);
      const auto duration = duration_s > 0
                                ? std::chrono::milliseconds(static_cast<long>(duration_s * 1000))
                                : std::chrono::milliseconds::max();
      const auto st = blexer::net::play_session(host, ports.port_game, driver, duration, &g_stop);
      std::cout << "directives " << st.directives << " reports " << st.reports << " fatigue "
                << driver.player().fatigue_acc << (st.hub_closed ? " (hub closed)" : "") << "\n";
      return 0;
    }

    if (*loop) {
      bs::SimOptions o;
      o.seed = seed;
      o.player.skill = skill;
      o.duration_ms = static_cast<blexer::TimeMs>(loop_duration_s * 1000);
      o.random_overrides_per_min = overrides_per_min;
      if (!loop_scenario.empty()) o.scenario = bs::load_scenario(loop_scenario, seed);
      const auto r = record_dir.empty() ? bs::run_simulation(o) : bs::record_simulation(o, record_dir);
      std::size_t in_band = 0, counted = 0;
      for (const auto& t : r.ticks) {
        if (!t.rolling_success) continue;
        ++counted;
        if (*t.rolling_success >= o.rules.success_low && *t.rolling_success <= o.rules.success_high)
          ++in_band;
      }
      json summary{{"seed", seed},
                   {"ticks", r.ticks.size()},
                   {"directives", r.directives.size()},
                   {"reports", r.reports.size()},
                   {"alerts", r.alerts.size()},
                   {"directive_hash", blexer::hex64(r.directive_hash)},
                   {"in_band_fraction", counted ? static_cast<double>(in_band) / counted : 0.0}};
      if (!r.ticks.empty()) {
        summary["final_difficulty"] = r.ticks.back().difficulty_target;
        summary["final_player_fatigue"] = r.ticks.back().player_fatigue;
      }
      std::cout << summary.dump(2) << "\n";
      return 0;
    }

    if (*gen) {
      const auto stream = bs::generate_stream(bs::load_scenario(scenario, seed));
      std::ofstream file;
      if (!out_file.empty()) file.open(out_file);
      std::ostream& out = out_file.empty() ? std::cout : file;
      for (const auto& e : stream)
        out << json{{"t", e.t}, {"device", blexer::wire::to_string(e.device)},
                    {"line", json::parse(blexer::wire::encode_datagram(e.env))}}
                   .dump()
            << "\n";
      std::cerr << "hash " << blexer::hex64(bs::stream_hash(stream)) << "\n";
      return 0;
    }

    if (*defaults) {
      const std::filesystem::path dir(defaults_dir);
      std::filesystem::create_directories(dir / "scenarios");
      write_json(dir / "plan.json", blexer::cam::to_json(blexer::cam::TherapyPlan{}));
      write_json(dir / "rules.json", blexer::cam::to_json(blexer::cam::RuleConfig{}));
      write_json(dir / "catalog.json", blexer::ipm::to_json(blexer::ipm::default_catalog()));
      blexer::runtime::HubConfig hub;
      hub.plan_file = dir / "plan.json";
      hub.rules_file = dir / "rules.json";
      hub.catalog_file = dir / "catalog.json";
      write_json(dir / "hub.json", blexer::runtime::to_json(hub));
      for (const auto& name : bs::bundled_scenario_names())
        write_json(dir / "scenarios" / (name + ".json"), bs::to_json(bs::bundled_scenario(name)));
      std::cout << "wrote defaults to " << dir << "\n";
      return 0;
    }
  } catch (const blexer::Error& e) {
    std::cerr << "error [" << blexer::to_string(e.code()) << "] " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
