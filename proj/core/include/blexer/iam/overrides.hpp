#pragma once

#include <string>

#include "blexer/cam/rules.hpp"
#include "blexer/iam/types.hpp"

namespace blexer::iam {

// "OVERRIDE:SET_DIFFICULTY" and so on.
std::string override_tag(OverrideKind kind);

// Throws Error{InvalidOverride} for a missing or out-of-range value and for
// PAUSE while paused or RESUME while running.
void validate_override(const OverrideCommand& cmd, bool paused);

// The directive an operator command turns into. Rule output other than R1
// is suppressed for one dwell period afterwards (PAUSE: until RESUME). When
// the last inferred fatigue is at or above the threshold, safety still
// applies on top of the command: difficulty at most current-1, rest, slow.
cam::Directive synthesize_override(const OverrideCommand& cmd, const cam::Directive& current,
                                   const cam::UserState& last_state, const cam::TherapyPlan& plan,
                                   const cam::RuleConfig& config, cam::DecisionMemory& memory,
                                   TimeMs now);

}  // namespace blexer::iam
