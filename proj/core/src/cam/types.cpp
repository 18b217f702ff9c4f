#include "blexer/cam/types.hpp"

#include <algorithm>
#include <cmath>

#include "blexer/common/error.hpp"

namespace blexer::cam {

std::string_view to_string(TaskCategory c) noexcept {
  switch (c) {
    case TaskCategory::Coordination: return "coordination";
    case TaskCategory::ReactionSpeed: return "reaction_speed";
    case TaskCategory::Memory: return "memory";
  }
  return "?";
}

std::string_view to_string(Pacing p) noexcept {
  switch (p) {
    case Pacing::Slow: return "slow";
    case Pacing::Normal: return "normal";
    case Pacing::Fast: return "fast";
  }
  return "?";
}

std::string_view to_string(FeedbackIntensity f) noexcept {
  switch (f) {
    case FeedbackIntensity::Low: return "low";
    case FeedbackIntensity::Medium: return "medium";
    case FeedbackIntensity::High: return "high";
  }
  return "?";
}

std::optional<TaskCategory> parse_category(std::string_view s) noexcept {
  for (auto c : kAllCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<Pacing> parse_pacing(std::string_view s) noexcept {
  for (auto p : {Pacing::Slow, Pacing::Normal, Pacing::Fast})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::optional<FeedbackIntensity> parse_feedback(std::string_view s) noexcept {
  for (auto f : {FeedbackIntensity::Low, FeedbackIntensity::Medium, FeedbackIntensity::High})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string_view to_string(TimeOfDay t) noexcept {
  switch (t) {
    case TimeOfDay::Morning: return "morning";
    case TimeOfDay::Afternoon: return "afternoon";
    case TimeOfDay::Evening: return "evening";
  }
  return "?";
}

TimeOfDay time_of_day_from_hour(int hour) noexcept {
  if (hour >= 5 && hour < 12) return TimeOfDay::Morning;
  if (hour >= 12 && hour < 18) return TimeOfDay::Afternoon;
  return TimeOfDay::Evening;
}

void validate(const TherapyPlan& plan) {
  auto bad = [](const char* field, const std::string& why) {
    throw Error(Errc::InvalidConfig, field, why);
  };
  if (plan.schema_version != kPlanSchemaVersion) bad("schema_version", "unsupported version");
  if (!(plan.engagement_threshold > 0.0 && plan.engagement_threshold < plan.fatigue_threshold &&
        plan.fatigue_threshold <= 1.0))
    bad("fatigue_threshold", "need 0 < engagement_threshold < fatigue_threshold <= 1");
  for (const auto& [cat, q] : plan.quotas)
    if (q < 0) bad("quotas", std::string(to_string(cat)) + " quota is negative");
  if (plan.max_difficulty < kMinDifficulty || plan.max_difficulty > kMaxDifficulty)
    bad("max_difficulty", "must be within [1,10]");
  if (plan.start_difficulty < kMinDifficulty || plan.start_difficulty > plan.max_difficulty)
    bad("start_difficulty", "must be within [1,max_difficulty]");
  if (!(plan.session_cap_s > 0.0)) bad("session_cap_s", "must be positive");
  if (plan.preferences.empty()) bad("preferences", "must rank at least one category");
}

void validate(const RuleConfig& config) {
  auto bad = [](const char* field, const std::string& why) {
    throw Error(Errc::InvalidConfig, field, why);
  };
  if (config.version != kRuleConfigVersion) bad("version", "unsupported version");
  if (!(config.success_low < config.success_high)) bad("success_low", "must be below success_high");
  if (config.dwell_ms <= 0) bad("dwell_s", "must be positive");
  if (config.report_window == 0) bad("report_window", "must be positive");
  if (!(config.seconds_per_rep > 0.0)) bad("seconds_per_rep", "must be positive");
  if (!(config.weights.rmssd_norm_ms > 0.0)) bad("weights.rmssd_norm_ms", "must be positive");
  if (!(config.weights.hr_elevation_scale > 0.0))
    bad("weights.hr_elevation_scale", "must be positive");
  for (auto c : kAllCategories) {
    auto it = config.base_reps.find(c);
    if (it == config.base_reps.end() || it->second <= 0)
      bad("base_reps", std::string(to_string(c)) + " needs a positive base repetition count");
  }
}

void ContextRecord::add_report(const ipm::PerformanceReport& r, std::size_t keep) {
  recent_reports.push_back(r);
  while (recent_reports.size() > keep) recent_reports.pop_front();
  ++category_counts[r.category];
}

std::optional<double> ContextRecord::recent_success(std::size_t n) const {
  if (recent_reports.empty() || n == 0) return std::nullopt;
  const std::size_t take = std::min(n, recent_reports.size());
  double sum = 0.0;
  for (std::size_t i = recent_reports.size() - take; i < recent_reports.size(); ++i)
    sum += recent_reports[i].success_rate;
  return sum / static_cast<double>(take);
}

const std::vector<TaskCategory>& ContextRecord::ranked_categories() const {
  return preferences.empty() ? plan.preferences : preferences;
}

int scaled_repetitions(const RuleConfig& config, TaskCategory category, int difficulty) {
  auto it = config.base_reps.find(category);
  const int base = it == config.base_reps.end() ? 10 : it->second;
  const int reps = static_cast<int>(std::lround(base * (1.0 + 0.1 * (difficulty - 1))));
  return std::max(1, reps);
}

double expected_duration_s(const RuleConfig& config, int repetitions, Pacing pacing) {
  double factor = 1.0;
  if (pacing == Pacing::Slow) factor = 1.5;
  if (pacing == Pacing::Fast) factor = 0.8;
  return repetitions * config.seconds_per_rep * factor;
}

Directive initial_directive(const TherapyPlan& plan, const RuleConfig& config, TimeMs now) {
  Directive d;
  d.task_category = plan.preferences.empty() ? TaskCategory::Coordination : plan.preferences.front();
  d.difficulty_target = plan.start_difficulty;
  d.repetitions = scaled_repetitions(config, d.task_category, d.difficulty_target);
  d.pacing = Pacing::Normal;
  d.duration_s = expected_duration_s(config, d.repetitions, d.pacing);
  d.rest = false;
  d.feedback_intensity = FeedbackIntensity::Medium;
  d.rationale = {kInitialRationale};
  d.issued_at = now;
  return d;
}

}  // namespace blexer::cam
