#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blexer/cam/types.hpp"

namespace blexer::cam {

// Rule identifiers as they appear in Directive::rationale.
inline constexpr const char* kRuleSafety = "R1";
inline constexpr const char* kRuleEngagement = "R2";
inline constexpr const char* kRuleUp = "R3";
inline constexpr const char* kRuleDown = "R4";
inline constexpr const char* kRuleHold = "R5";
inline constexpr const char* kOverridePrefix = "OVERRIDE:";

// State the rule engine carries between ticks.
struct DecisionMemory {
  std::optional<TimeMs> last_difficulty_change;
  std::optional<TimeMs> low_engagement_since;
  std::optional<TimeMs> override_until;  // non-safety rules suppressed before this
  bool paused = false;
};

// Stage two: one decision tick. Rules in priority order:
//   R1 safety      fatigue >= theta_f: difficulty-1 (floor 1), rest, slow pacing
//   R2 engagement  engagement < theta_e for >= dwell: next preferred category
//                  whose quota is unmet (needs sensor evidence, confidence > 0)
//   R3 up          mean success of the last reports > success_high and
//                  fatigue < theta_f/2: difficulty+1 (plan cap)
//   R4 down        mean success < success_low: difficulty-1 (floor 1)
//   R5 hold        nothing fired
// R1 decides difficulty when it fires; otherwise R3 then R4, both blocked
// for `dwell` after the previous difficulty change. R2 composes with the
// others. Rest and slow pacing last only while R1 fires; feedback is low
// under R1, high under R2, otherwise medium. During an override window or
// a pause only R1 may act.
Directive decide(const UserState& state, const ContextRecord& ctx, const Directive& current,
                 DecisionMemory& memory, const RuleConfig& config, TimeMs now);

// Pluggable decision stage; the shipped policy is the rule table above.
class DecisionPolicy {
 public:
  virtual ~DecisionPolicy() = default;
  virtual Directive decide(const UserState& state, const ContextRecord& ctx,
                           const Directive& current, TimeMs now) = 0;
  virtual DecisionMemory& memory() = 0;
};

class RulePolicy final : public DecisionPolicy {
 public:
  explicit RulePolicy(RuleConfig config) : config_(std::move(config)) {}
  Directive decide(const UserState& state, const ContextRecord& ctx, const Directive& current,
                   TimeMs now) override {
    return cam::decide(state, ctx, current, memory_, config_, now);
  }
  DecisionMemory& memory() override { return memory_; }
  const RuleConfig& config() const { return config_; }
  void set_config(RuleConfig c) { config_ = std::move(c); }

 private:
  RuleConfig config_;
  DecisionMemory memory_;
};

// Names that identify a concrete game or exercise, or an in-game parameter.
// A directive carrying any of them crosses the CAM/IPM boundary.
bool is_game_specific_field(const std::string& name);

// Throws Error{BoundaryViolation} naming the field when the directive
// carries game-specific fields, when a value is out of range, or when a rest
// directive raises difficulty above `current_difficulty`.
void validate_directive(const Directive& d, std::optional<int> current_difficulty = std::nullopt);

// Human-readable trace of the rules recorded in d.rationale, one line per
// rule in firing order, with the values and thresholds involved.
std::string explain(const Directive& d, const UserState& state, const ContextRecord& ctx,
                    const RuleConfig& config);

}  // namespace blexer::cam
