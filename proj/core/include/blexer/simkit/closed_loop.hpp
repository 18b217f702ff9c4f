#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/cam/types.hpp"
#include "blexer/common/event_log.hpp"
#include "blexer/iam/types.hpp"
#include "blexer/ipm/catalog.hpp"
#include "blexer/ipm/play_controller.hpp"
#include "blexer/simkit/player.hpp"
#include "blexer/simkit/scenario.hpp"

namespace blexer::simkit {

struct OverrideEvent {
  TimeMs at = 0;
  iam::OverrideCommand command;
};

struct SimOptions {
  std::uint64_t seed = 1;
  PlayerModel player;
  TimeMs start_ms = 0;
  TimeMs duration_ms = 600'000;
  cam::TherapyPlan plan;
  cam::RuleConfig rules;
  ipm::Catalog catalog = ipm::default_catalog();
  // Scripted sensor streams instead of the fatigue-coupled physiology.
  std::optional<ScenarioScript> scenario;
  double resting_bpm = 65.0;
  std::vector<OverrideEvent> overrides;
  double random_overrides_per_min = 0.0;
  bool use_sequence = false;  // drive exercise choice from a PCG plan
  std::string session_id = "sim";
  EventSink* sink = nullptr;
};

// Snapshot after each decision tick.
struct TickRecord {
  TimeMs t = 0;
  cam::UserState state;
  double player_fatigue = 0.0;
  int difficulty_target = 0;
  int play_level = 0;
  ipm::Phase phase = ipm::Phase::Idle;
  std::optional<double> rolling_success;  // mean of the last 3 reports
};

struct EmittedDirective {
  cam::Directive directive;
  std::optional<int> previous_difficulty;
  double fatigue = 0.0;  // last inferred fatigue when it was decided
  bool had_state = false;
};

struct SimResult {
  std::vector<TickRecord> ticks;
  std::vector<EmittedDirective> directives;
  std::vector<cam::Directive> received;  // as decoded by the game side
  std::vector<ipm::PerformanceReport> reports;
  std::vector<iam::Alert> alerts;
  std::uint64_t directive_hash = 0;
  nlohmann::json meta;
  TimeMs ended_at = 0;
};

// The whole loop on a logical 100 ms clock: sensors -> sessions -> engine,
// directives -> game link codec -> play controller -> synthetic player,
// reports -> codec -> engine.
SimResult run_simulation(const SimOptions& options);

// Runs the simulation with a file recorder under `dir` and writes session.json.
SimResult record_simulation(SimOptions options, const std::filesystem::path& dir);

}  // namespace blexer::simkit
