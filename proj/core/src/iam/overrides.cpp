#include "blexer/iam/overrides.hpp"

#include <algorithm>

#include "blexer/common/error.hpp"

namespace blexer::iam {

std::string_view to_string(OverrideKind k) noexcept {
  switch (k) {
    case OverrideKind::SetDifficulty: return "SET_DIFFICULTY";
    case OverrideKind::ForceRest: return "FORCE_REST";
    case OverrideKind::SwitchCategory: return "SWITCH_CATEGORY";
    case OverrideKind::Pause: return "PAUSE";
    case OverrideKind::Resume: return "RESUME";
  }
  return "?";
}

std::optional<OverrideKind> parse_override_kind(std::string_view s) noexcept {
  for (auto k : {OverrideKind::SetDifficulty, OverrideKind::ForceRest, OverrideKind::SwitchCategory,
                 OverrideKind::Pause, OverrideKind::Resume})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string override_tag(OverrideKind kind) {
  return std::string(cam::kOverridePrefix) + std::string(to_string(kind));
}

void validate_override(const OverrideCommand& cmd, bool paused) {
  switch (cmd.kind) {
    case OverrideKind::SetDifficulty:
      if (!cmd.level) throw Error(Errc::InvalidOverride, "value", "SET_DIFFICULTY needs a level");
      if (*cmd.level < cam::kMinDifficulty || *cmd.level > cam::kMaxDifficulty)
        throw Error(Errc::InvalidOverride, "value",
                    "level " + std::to_string(*cmd.level) + " outside [1,10]");
      break;
    case OverrideKind::SwitchCategory:
      if (!cmd.category)
        throw Error(Errc::InvalidOverride, "value", "SWITCH_CATEGORY needs a task category");
      break;
    case OverrideKind::Pause:
      if (paused) throw Error(Errc::InvalidOverride, "kind", "already paused");
      break;
    case OverrideKind::Resume:
      if (!paused) throw Error(Errc::InvalidOverride, "kind", "not paused");
      break;
    case OverrideKind::ForceRest:
      break;
  }
}

cam::Directive synthesize_override(const OverrideCommand& cmd, const cam::Directive& current,
                                   const cam::UserState& last_state, const cam::TherapyPlan& plan,
                                   const cam::RuleConfig& config, cam::DecisionMemory& memory,
                                   TimeMs now) {
  validate_override(cmd, memory.paused);
  cam::Directive d = current;
  d.rationale = {override_tag(cmd.kind)};
  d.extensions.clear();
  d.issued_at = now;

  switch (cmd.kind) {
    case OverrideKind::SetDifficulty:
      d.difficulty_target = *cmd.level;
      d.rest = false;
      d.pacing = cam::Pacing::Normal;
      break;
    case OverrideKind::ForceRest:
    case OverrideKind::Pause:
      d.rest = true;
      d.pacing = cam::Pacing::Slow;
      d.feedback_intensity = cam::FeedbackIntensity::Low;
      break;
    case OverrideKind::SwitchCategory:
      d.task_category = *cmd.category;
      break;
    case OverrideKind::Resume:
      d.rest = false;
      d.pacing = cam::Pacing::Normal;
      d.feedback_intensity = cam::FeedbackIntensity::Medium;
      break;
  }

  if (last_state.fatigue >= plan.fatigue_threshold) {
    d.difficulty_target =
        std::min(d.difficulty_target, std::max(cam::kMinDifficulty, current.difficulty_target - 1));
    d.rest = true;
    d.pacing = cam::Pacing::Slow;
    d.feedback_intensity = cam::FeedbackIntensity::Low;
    d.rationale.emplace_back(cam::kRuleSafety);
  }

  if (cmd.kind == OverrideKind::Pause) {
    memory.paused = true;
  } else {
    memory.paused = false;
    memory.override_until = now + config.dwell_ms;
  }
  memory.low_engagement_since.reset();
  if (d.difficulty_target != current.difficulty_target) memory.last_difficulty_change = now;

  d.repetitions = cam::scaled_repetitions(config, d.task_category, d.difficulty_target);
  d.duration_s = cam::expected_duration_s(config, d.repetitions, d.pacing);
  return d;
}

}  // namespace blexer::iam
