#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blexer/cam/directive.hpp"
#include "blexer/common/time.hpp"
#include "blexer/ipm/report.hpp"

namespace blexer::cam {

// Inferred indices, all in [0,1].
struct UserState {
  double workload = 0.0;
  double engagement = 0.0;
  double fatigue = 0.0;
  double confidence = 0.0;
  TimeMs t = 0;
  bool operator==(const UserState&) const = default;
};

inline constexpr int kPlanSchemaVersion = 1;

// Therapist-defined goals for a session.
struct TherapyPlan {
  int schema_version = kPlanSchemaVersion;
  std::map<TaskCategory, int> quotas{{TaskCategory::Coordination, 3},
                                     {TaskCategory::ReactionSpeed, 2},
                                     {TaskCategory::Memory, 1}};
  double fatigue_threshold = 0.8;     // theta_f
  double engagement_threshold = 0.3;  // theta_e
  int max_difficulty = kMaxDifficulty;
  int start_difficulty = 3;
  double session_cap_s = 1800.0;
  std::vector<TaskCategory> preferences{TaskCategory::Coordination, TaskCategory::ReactionSpeed,
                                        TaskCategory::Memory};
  std::set<std::string> excluded_exercises;

  bool operator==(const TherapyPlan&) const = default;
};

// Throws Error{InvalidConfig} unless 0 < theta_e < theta_f <= 1, quotas are
// non-negative and the difficulty bounds are inside [1,10].
void validate(const TherapyPlan& plan);

struct InferenceWeights {
  double fatigue_hr = 0.35;
  double fatigue_hrv = 0.25;
  double fatigue_motion = 0.25;
  double fatigue_affect = 0.15;
  double engagement_flatness = 0.5;
  double engagement_success = 0.3;
  double engagement_affect = 0.2;
  double workload_hr = 0.6;
  double workload_difficulty = 0.4;
  double hr_elevation_scale = 0.5;  // relative elevation mapped to 1.0
  double rmssd_norm_ms = 50.0;
  bool operator==(const InferenceWeights&) const = default;
};

inline constexpr int kRuleConfigVersion = 1;

struct RuleConfig {
  int version = kRuleConfigVersion;
  double success_high = 0.8;
  double success_low = 0.4;
  TimeMs dwell_ms = 30'000;
  std::size_t report_window = 3;
  InferenceWeights weights;
  std::map<TaskCategory, int> base_reps{{TaskCategory::Coordination, 10},
                                        {TaskCategory::ReactionSpeed, 12},
                                        {TaskCategory::Memory, 8}};
  double seconds_per_rep = 3.0;
  // Counts surprise as engagement-positive (it can be switched off).
  bool surprise_engaging = true;

  bool operator==(const RuleConfig&) const = default;
};

// Throws Error{InvalidConfig} unless success_low < success_high, dwell > 0
// and every base repetition count is positive.
void validate(const RuleConfig& config);

enum class TimeOfDay { Morning, Afternoon, Evening };
std::string_view to_string(TimeOfDay t) noexcept;
TimeOfDay time_of_day_from_hour(int hour) noexcept;

struct ContextRecord {
  TherapyPlan plan;
  std::map<TaskCategory, int> category_counts;  // completed exercises
  std::deque<ipm::PerformanceReport> recent_reports;
  TimeOfDay time_of_day = TimeOfDay::Morning;
  std::vector<TaskCategory> preferences;  // empty: use plan.preferences

  void add_report(const ipm::PerformanceReport& r, std::size_t keep = 16);
  // Mean success over the newest `n` reports; absent with no reports.
  std::optional<double> recent_success(std::size_t n) const;
  const std::vector<TaskCategory>& ranked_categories() const;
};

// Repetitions and expected duration for a category at a difficulty.
int scaled_repetitions(const RuleConfig& config, TaskCategory category, int difficulty);
double expected_duration_s(const RuleConfig& config, int repetitions, Pacing pacing);

// The directive a session starts from.
Directive initial_directive(const TherapyPlan& plan, const RuleConfig& config, TimeMs now);

}  // namespace blexer::cam
