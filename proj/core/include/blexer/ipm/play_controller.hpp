#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blexer/cam/directive.hpp"
#include "blexer/ipm/catalog.hpp"
#include "blexer/ipm/dda.hpp"
#include "blexer/ipm/feedback.hpp"
#include "blexer/ipm/pcg.hpp"
#include "blexer/ipm/report.hpp"

namespace blexer::ipm {

enum class Phase { Idle, Active, Rest, Done };
std::string_view to_string(Phase p) noexcept;

struct SessionState {
  std::string current_exercise;
  cam::TaskCategory category = cam::TaskCategory::Coordination;
  int difficulty = 1;
  int reps_done = 0;
  int reps_target = 0;
  Phase phase = Phase::Idle;
  double elapsed_s = 0.0;
  bool operator==(const SessionState&) const = default;
};

// What the game is told to run.
struct ExerciseSetup {
  std::string exercise_id;
  cam::TaskCategory category = cam::TaskCategory::Coordination;
  int difficulty = 1;
  int reps_target = 0;
  GameParams params;
  FeedbackSettings feedback;
  bool fallback = false;
  bool operator==(const ExerciseSetup&) const = default;
};

// Least-recently-played bookkeeping; never-played exercises come first,
// catalog order breaks ties.
class PlayHistory {
 public:
  void played(const std::string& id) { last_[id] = ++clock_; }
  std::uint64_t last_played(const std::string& id) const {
    auto it = last_.find(id);
    return it == last_.end() ? 0 : it->second;
  }

 private:
  std::map<std::string, std::uint64_t> last_;
  std::uint64_t clock_ = 0;
};

// Picks a concrete exercise for a non-rest directive. When the requested
// category has no eligible exercise the nearest category in `preference`
// order is used and the setup is flagged. Throws Error{EmptyCategory} when
// no category has one.
ExerciseSetup resolve_directive(const cam::Directive& d, const Catalog& catalog,
                                const PlayHistory& history,
                                const std::vector<cam::TaskCategory>& preference,
                                const std::set<std::string>& excluded = {});

struct ControllerOptions {
  TimeMs rest_ms = 30'000;
  double abandon_factor = 2.0;  // exercise abandoned after this many expected durations
  std::size_t dda_window = 2;   // reports considered by dda_step
  DdaBands bands;
  std::vector<cam::TaskCategory> preference{cam::kAllCategories[0], cam::kAllCategories[1],
                                            cam::kAllCategories[2]};
  std::set<std::string> excluded;
  std::optional<SequencePlan> sequence;
};

// The game-side state machine. One instance per connected game. Directives
// arrive through on_directive; the game loop calls on_rep for every attempt
// and tick periodically. Finished exercises queue a PerformanceReport that
// take_reports() hands over.
class PlayController {
 public:
  explicit PlayController(Catalog catalog, ControllerOptions options = {});

  void on_directive(const cam::Directive& d, TimeMs now);
  void on_rep(bool success, TimeMs now);
  void tick(TimeMs now);
  // Ends the session; an exercise in progress is reported incomplete.
  void finish(TimeMs now);

  std::vector<PerformanceReport> take_reports();

  const SessionState& state() const { return state_; }
  const std::optional<ExerciseSetup>& setup() const { return setup_; }
  const std::optional<cam::Directive>& directive() const { return directive_; }
  bool paused() const { return paused_; }
  std::optional<TimeMs> rest_until() const { return rest_until_; }
  // Time of the next attempt while ACTIVE: the rep itself plus the pacing gap.
  TimeMs rep_period_ms() const;
  const Catalog& catalog() const { return catalog_; }

 private:
  void start_exercise(TimeMs now, bool new_directive);
  void end_exercise(TimeMs now, bool incomplete);
  void enter_rest(TimeMs now, bool pause);
  void refresh_setup();

  Catalog catalog_;
  ControllerOptions options_;
  PlayHistory history_;
  SessionState state_;
  std::optional<ExerciseSetup> setup_;
  std::optional<cam::Directive> directive_;
  std::vector<PerformanceReport> pending_;
  std::vector<PerformanceReport> recent_;  // reports of the running directive
  std::vector<bool> consumed_;             // sequence slots already played
  TimeMs exercise_started_ = 0;
  int errors_ = 0;
  std::optional<TimeMs> rest_until_;
  bool paused_ = false;
  bool fallback_ = false;
};

inline constexpr int kRepActionMs = 2000;

}  // namespace blexer::ipm
