#include "blexer/ipm/play_controller.hpp"

#include <algorithm>

#include "blexer/cam/rules.hpp"
#include "blexer/common/error.hpp"

namespace blexer::ipm {

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Idle: return "IDLE";
    case Phase::Active: return "ACTIVE";
    case Phase::Rest: return "REST";
    case Phase::Done: return "DONE";
  }
  return "?";
}

namespace {

std::vector<cam::TaskCategory> fallback_order(cam::TaskCategory requested,
                                              const std::vector<cam::TaskCategory>& preference) {
  std::vector<cam::TaskCategory> order{requested};
  auto pos = std::find(preference.begin(), preference.end(), requested);
  if (pos == preference.end()) {
    for (auto c : preference)
      if (c != requested) order.push_back(c);
    return order;
  }
  const auto i = static_cast<long>(pos - preference.begin());
  const auto n = static_cast<long>(preference.size());
  for (long dist = 1; dist < n; ++dist) {
    if (i + dist < n) order.push_back(preference[static_cast<std::size_t>(i + dist)]);
    if (i - dist >= 0) order.push_back(preference[static_cast<std::size_t>(i - dist)]);
  }
  return order;
}

bool is_pause(const cam::Directive& d) {
  const std::string tag = std::string(cam::kOverridePrefix) + "PAUSE";
  return std::find(d.rationale.begin(), d.rationale.end(), tag) != d.rationale.end();
}

}  // namespace

ExerciseSetup resolve_directive(const cam::Directive& d, const Catalog& catalog,
                                const PlayHistory& history,
                                const std::vector<cam::TaskCategory>& preference,
                                const std::set<std::string>& excluded) {
  for (auto category : fallback_order(d.task_category, preference)) {
    auto pool = catalog.in_category(category, excluded);
    if (pool.empty()) continue;
    const ExerciseSpec* pick = pool.front();
    for (const auto* e : pool)
      if (history.last_played(e->id) < history.last_played(pick->id)) pick = e;
    ExerciseSetup s;
    s.exercise_id = pick->id;
    s.category = pick->category;
    s.difficulty = std::clamp(d.difficulty_target, cam::kMinDifficulty, cam::kMaxDifficulty);
    s.reps_target = d.repetitions;
    s.params = bind_params(*pick, s.difficulty, d.pacing);
    s.feedback = apply_feedback_intensity(d.feedback_intensity);
    s.fallback = category != d.task_category;
    return s;
  }
  throw Error(Errc::EmptyCategory, std::string(to_string(d.task_category)),
              "no exercise available in any category");
}

PlayController::PlayController(Catalog catalog, ControllerOptions options)
    : catalog_(std::move(catalog)), options_(std::move(options)) {
  if (options_.sequence) consumed_.assign(options_.sequence->slots.size(), false);
}

void PlayController::on_directive(const cam::Directive& d, TimeMs now) {
  if (state_.phase == Phase::Done) return;
  std::optional<cam::Directive> previous = directive_;
  directive_ = d;

  if (d.rest) {
    if (state_.phase == Phase::Rest) {
      if (is_pause(d)) enter_rest(now, true);
      return;
    }
    if (state_.phase == Phase::Active) end_exercise(now, true);
    enter_rest(now, is_pause(d));
    return;
  }

  switch (state_.phase) {
    case Phase::Idle:
      start_exercise(now, true);
      break;
    case Phase::Rest:
      // A timed rest runs out on its own; a pause ends with the next
      // non-rest directive.
      if (paused_) {
        paused_ = false;
        rest_until_.reset();
        start_exercise(now, true);
      }
      break;
    case Phase::Active:
      recent_.clear();
      if (!previous || previous->task_category != d.task_category) {
        end_exercise(now, true);
        start_exercise(now, true);
        break;
      }
      state_.difficulty = std::clamp(d.difficulty_target, cam::kMinDifficulty, cam::kMaxDifficulty);
      state_.reps_target = d.repetitions;
      refresh_setup();
      if (state_.reps_done >= state_.reps_target) {
        end_exercise(now, false);
        start_exercise(now, false);
      }
      break;
    case Phase::Done:
      break;
  }
}

void PlayController::on_rep(bool success, TimeMs now) {
  if (state_.phase != Phase::Active) return;
  ++state_.reps_done;
  if (!success) ++errors_;
  state_.elapsed_s = static_cast<double>(now - exercise_started_) / 1000.0;
  if (state_.reps_done >= state_.reps_target) {
    end_exercise(now, false);
    start_exercise(now, false);
  }
}

void PlayController::tick(TimeMs now) {
  if (state_.phase == Phase::Active) {
    state_.elapsed_s = static_cast<double>(now - exercise_started_) / 1000.0;
    if (directive_ && state_.elapsed_s > options_.abandon_factor * directive_->duration_s) {
      end_exercise(now, true);
      start_exercise(now, false);
    }
  } else if (state_.phase == Phase::Rest && !paused_ && rest_until_ && now >= *rest_until_) {
    rest_until_.reset();
    if (directive_)
      start_exercise(now, true);
    else
      state_.phase = Phase::Idle;
  }
}

void PlayController::finish(TimeMs now) {
  if (state_.phase == Phase::Active) end_exercise(now, true);
  state_.phase = Phase::Done;
  setup_.reset();
  rest_until_.reset();
  paused_ = false;
}

std::vector<PerformanceReport> PlayController::take_reports() {
  std::vector<PerformanceReport> out;
  out.swap(pending_);
  return out;
}

TimeMs PlayController::rep_period_ms() const {
  return kRepActionMs + (setup_ ? setup_->params.inter_rep_gap_ms : 0);
}

void PlayController::start_exercise(TimeMs now, bool new_directive) {
  const cam::Directive& d = *directive_;
  const int cap = std::clamp(d.difficulty_target, cam::kMinDifficulty, cam::kMaxDifficulty);

  ExerciseSetup setup;
  int offset = 0;
  bool from_sequence = false;
  if (options_.sequence) {
    const auto& slots = options_.sequence->slots;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (consumed_[i] || slots[i].category != d.task_category) continue;
      const ExerciseSpec* spec = catalog_.find(slots[i].exercise_id);
      if (!spec || options_.excluded.count(spec->id)) continue;
      consumed_[i] = true;
      offset = slots[i].offset;
      setup.exercise_id = spec->id;
      setup.category = spec->category;
      from_sequence = true;
      break;
    }
  }
  if (!from_sequence) {
    setup = resolve_directive(d, catalog_, history_, options_.preference, options_.excluded);
  }

  const int base = new_directive ? cap : state_.difficulty;
  state_.difficulty = std::clamp(base + offset, cam::kMinDifficulty, cap);
  state_.current_exercise = setup.exercise_id;
  state_.category = setup.category;
  state_.reps_done = 0;
  state_.reps_target = d.repetitions;
  state_.phase = Phase::Active;
  state_.elapsed_s = 0.0;
  errors_ = 0;
  exercise_started_ = now;
  fallback_ = setup.fallback;
  history_.played(setup.exercise_id);
  if (new_directive) recent_.clear();
  refresh_setup();
}

void PlayController::end_exercise(TimeMs now, bool incomplete) {
  if (state_.phase != Phase::Active) return;
  if (state_.reps_done > 0 || !incomplete) {
    PerformanceReport r;
    r.exercise_id = state_.current_exercise;
    r.category = state_.category;
    r.reps_done = state_.reps_done;
    r.errors = errors_;
    r.success_rate = state_.reps_done > 0
                         ? static_cast<double>(state_.reps_done - errors_) / state_.reps_done
                         : 0.0;
    r.completion_time_s = static_cast<double>(std::max<TimeMs>(0, now - exercise_started_)) / 1000.0;
    r.ended_at = now;
    r.incomplete = incomplete;
    r.fallback = fallback_;
    pending_.push_back(r);
    recent_.push_back(r);
    if (!incomplete && directive_) {
      const std::size_t k = std::min(options_.dda_window, recent_.size());
      std::span<const PerformanceReport> window(recent_.data() + recent_.size() - k, k);
      state_.difficulty =
          dda_step(window, state_.difficulty, directive_->difficulty_target, options_.bands);
    }
  }
  state_.reps_done = 0;
  errors_ = 0;
}

void PlayController::enter_rest(TimeMs now, bool pause) {
  state_.phase = Phase::Rest;
  state_.reps_done = 0;
  state_.elapsed_s = 0.0;
  paused_ = pause;
  if (pause)
    rest_until_.reset();
  else
    rest_until_ = now + options_.rest_ms;
  setup_.reset();
}

void PlayController::refresh_setup() {
  const ExerciseSpec* spec = catalog_.find(state_.current_exercise);
  if (!spec || !directive_) {
    setup_.reset();
    return;
  }
  ExerciseSetup s;
  s.exercise_id = spec->id;
  s.category = spec->category;
  s.difficulty = state_.difficulty;
  s.reps_target = state_.reps_target;
  s.params = bind_params(*spec, state_.difficulty, directive_->pacing);
  s.feedback = apply_feedback_intensity(directive_->feedback_intensity);
  s.fallback = fallback_;
  setup_ = s;
}

}  // namespace blexer::ipm
