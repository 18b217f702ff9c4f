#include "blexer/cam/rules.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "blexer/common/error.hpp"

namespace blexer::cam {

namespace {

std::optional<TaskCategory> next_category(const ContextRecord& ctx, TaskCategory current) {
  const auto& ranked = ctx.ranked_categories();
  if (ranked.empty()) return std::nullopt;
  auto pos = std::find(ranked.begin(), ranked.end(), current);
  const std::size_t start = pos == ranked.end() ? 0 : static_cast<std::size_t>(pos - ranked.begin()) + 1;

  auto unmet = [&](TaskCategory c) {
    auto q = ctx.plan.quotas.find(c);
    const int quota = q == ctx.plan.quotas.end() ? 0 : q->second;
    auto n = ctx.category_counts.find(c);
    const int done = n == ctx.category_counts.end() ? 0 : n->second;
    return done < quota;
  };
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const TaskCategory c = ranked[(start + i) % ranked.size()];
    if (c != current && unmet(c)) return c;
  }
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const TaskCategory c = ranked[(start + i) % ranked.size()];
    if (c != current) return c;
  }
  return std::nullopt;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Directive decide(const UserState& state, const ContextRecord& ctx, const Directive& current,
                 DecisionMemory& memory, const RuleConfig& config, TimeMs now) {
  const TherapyPlan& plan = ctx.plan;
  Directive next = current;
  next.rationale.clear();
  next.extensions.clear();
  next.issued_at = now;

  const bool suppressed = memory.paused || (memory.override_until && now < *memory.override_until);
  if (!suppressed) memory.override_until.reset();

  const bool safety = state.fatigue >= plan.fatigue_threshold;
  if (safety) {
    next.difficulty_target = std::max(kMinDifficulty, current.difficulty_target - 1);
    next.rest = true;
    next.pacing = Pacing::Slow;
    next.feedback_intensity = FeedbackIntensity::Low;
    next.rationale.emplace_back(kRuleSafety);
  } else if (suppressed) {
    // Operator-set values stand; nothing else may move them.
    memory.low_engagement_since.reset();
    next.rationale.emplace_back(kRuleHold);
    return next;
  } else {
    next.rest = false;
    next.pacing = Pacing::Normal;
    next.feedback_intensity = FeedbackIntensity::Medium;
  }

  if (suppressed) {
    memory.low_engagement_since.reset();
  } else if (state.engagement < plan.engagement_threshold && state.confidence > 0.0) {
    if (!memory.low_engagement_since) memory.low_engagement_since = now;
    if (now - *memory.low_engagement_since >= config.dwell_ms) {
      if (auto c = next_category(ctx, current.task_category)) {
        next.task_category = *c;
        if (!safety) next.feedback_intensity = FeedbackIntensity::High;
        next.rationale.emplace_back(kRuleEngagement);
        memory.low_engagement_since = now;
      }
    }
  } else {
    memory.low_engagement_since.reset();
  }

  if (!safety && !suppressed) {
    const bool dwell_elapsed = !memory.last_difficulty_change ||
                               now - *memory.last_difficulty_change >= config.dwell_ms;
    const auto success = ctx.recent_success(config.report_window);
    if (dwell_elapsed && success) {
      const int cap = std::min(plan.max_difficulty, kMaxDifficulty);
      if (*success > config.success_high && state.fatigue < 0.5 * plan.fatigue_threshold &&
          current.difficulty_target < cap) {
        next.difficulty_target = current.difficulty_target + 1;
        next.rationale.emplace_back(kRuleUp);
      } else if (*success < config.success_low && current.difficulty_target > kMinDifficulty) {
        next.difficulty_target = current.difficulty_target - 1;
        next.rationale.emplace_back(kRuleDown);
      }
    }
  }

  if (next.difficulty_target != current.difficulty_target) memory.last_difficulty_change = now;
  if (next.rationale.empty()) next.rationale.emplace_back(kRuleHold);

  next.repetitions = scaled_repetitions(config, next.task_category, next.difficulty_target);
  next.duration_s = expected_duration_s(config, next.repetitions, next.pacing);
  return next;
}

bool is_game_specific_field(const std::string& name) {
  std::string lower;
  lower.reserve(name.size());
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static constexpr std::string_view kForbidden[] = {
      "exercise",  "level",      "scene",       "speed",         "targets",
      "target_count", "spawn_rate", "inter_rep_gap_ms", "param_map", "game_params"};
  for (auto f : kForbidden)
    if (lower == f) return true;
  if (lower.find("game") != std::string::npos) return true;
  if (lower.size() > 3 && lower.compare(lower.size() - 3, 3, "_id") == 0) return true;
  return false;
}

void validate_directive(const Directive& d, std::optional<int> current_difficulty) {
  auto violation = [](const std::string& field, const std::string& why) {
    throw Error(Errc::BoundaryViolation, field, why);
  };
  for (const auto& [name, value] : d.extensions)
    if (is_game_specific_field(name)) violation(name, "game-specific field in a CAM directive");
  if (d.difficulty_target < kMinDifficulty || d.difficulty_target > kMaxDifficulty)
    violation("difficulty_target", "must be within [1,10]");
  if (d.repetitions <= 0) violation("repetitions", "must be positive");
  if (!std::isfinite(d.duration_s) || d.duration_s <= 0.0) violation("duration_s", "must be positive");
  if (d.rest && current_difficulty && d.difficulty_target > *current_difficulty)
    violation("difficulty_target", "a rest directive may not raise difficulty");
}

std::string explain(const Directive& d, const UserState& state, const ContextRecord& ctx,
                    const RuleConfig& config) {
  const TherapyPlan& plan = ctx.plan;
  std::string out;
  auto line = [&](const std::string& s) {
    if (!out.empty()) out.push_back('\n');
    out += s;
  };
  for (const auto& id : d.rationale) {
    if (id == kRuleSafety) {
      line("R1: fatigue " + fixed2(state.fatigue) + " ≥ θ_f " + fixed2(plan.fatigue_threshold) +
           " → difficulty " + std::to_string(d.difficulty_target) + ", rest, slow pacing");
    } else if (id == kRuleEngagement) {
      line("R2: engagement " + fixed2(state.engagement) + " < θ_e " +
           fixed2(plan.engagement_threshold) + " for ≥ " +
           std::to_string(config.dwell_ms / 1000) + " s → category " +
           std::string(to_string(d.task_category)));
    } else if (id == kRuleUp) {
      line("R3: mean success " + fixed2(ctx.recent_success(config.report_window).value_or(0.0)) +
           " > " + fixed2(config.success_high) + " and fatigue " + fixed2(state.fatigue) + " < " +
           fixed2(0.5 * plan.fatigue_threshold) + " → difficulty " +
           std::to_string(d.difficulty_target));
    } else if (id == kRuleDown) {
      line("R4: mean success " + fixed2(ctx.recent_success(config.report_window).value_or(0.0)) +
           " < " + fixed2(config.success_low) + " → difficulty " +
           std::to_string(d.difficulty_target));
    } else if (id == kRuleHold) {
      line("R5: no change; all indices within bands");
    } else if (id.rfind(kOverridePrefix, 0) == 0) {
      line(id + ": therapist override → difficulty " + std::to_string(d.difficulty_target) +
           ", category " + std::string(to_string(d.task_category)) + (d.rest ? ", rest" : ""));
    } else {
      line(id);
    }
  }
  return out;
}

}  // namespace blexer::cam
