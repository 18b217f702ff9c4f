#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blexer/common/time.hpp"

namespace blexer::cam {

enum class TaskCategory { Coordination, ReactionSpeed, Memory };
enum class Pacing { Slow, Normal, Fast };
enum class FeedbackIntensity { Low, Medium, High };

inline constexpr TaskCategory kAllCategories[] = {
    TaskCategory::Coordination, TaskCategory::ReactionSpeed, TaskCategory::Memory};

std::string_view to_string(TaskCategory c) noexcept;
std::string_view to_string(Pacing p) noexcept;
std::string_view to_string(FeedbackIntensity f) noexcept;
std::optional<TaskCategory> parse_category(std::string_view s) noexcept;
std::optional<Pacing> parse_pacing(std::string_view s) noexcept;
std::optional<FeedbackIntensity> parse_feedback(std::string_view s) noexcept;

inline constexpr int kMinDifficulty = 1;
inline constexpr int kMaxDifficulty = 10;

// Rationale of the directive a session starts from.
inline constexpr const char* kInitialRationale = "INIT";

// CAM's game-agnostic adaptation command. It names a task category, never a
// concrete exercise, and carries no in-game parameter names.
struct Directive {
  TaskCategory task_category = TaskCategory::Coordination;
  int difficulty_target = 3;
  int repetitions = 10;
  double duration_s = 30.0;
  Pacing pacing = Pacing::Normal;
  bool rest = false;
  FeedbackIntensity feedback_intensity = FeedbackIntensity::Medium;
  std::vector<std::string> rationale;
  TimeMs issued_at = 0;
  // Fields received on the wire that are not part of the schema, kept as raw
  // JSON text so the boundary check can see them.
  std::map<std::string, std::string> extensions;

  bool operator==(const Directive&) const = default;

  // Equality over the fields the game acts on (ignores rationale, time).
  bool same_action(const Directive& o) const {
    return task_category == o.task_category && difficulty_target == o.difficulty_target &&
           repetitions == o.repetitions && duration_s == o.duration_s && pacing == o.pacing &&
           rest == o.rest && feedback_intensity == o.feedback_intensity;
  }
};

}  // namespace blexer::cam
