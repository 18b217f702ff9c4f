#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace blexer::simkit {

enum class AccelPattern { Smooth, Jerky };
std::string_view to_string(AccelPattern p) noexcept;

struct ScenarioPhase {
  double duration_s = 60.0;
  double bpm_mean = 70.0;
  double bpm_slope = 0.0;  // BPM per second, centred on the phase midpoint
  double rmssd_target_ms = 40.0;
  // Relative weights over anger, disgust, fear, happiness, sadness,
  // surprise, neutral; each affect frame is a noisy draw around them.
  std::array<double, 7> affect_profile{0.02, 0.01, 0.02, 0.25, 0.05, 0.05, 0.60};
  AccelPattern accel_pattern = AccelPattern::Smooth;
  double confidence_level = 90.0;
  bool operator==(const ScenarioPhase&) const = default;
};

struct ScenarioScript {
  std::string name;
  std::vector<ScenarioPhase> phases;
  std::uint64_t seed = 1;

  double duration_s() const;
  bool operator==(const ScenarioScript&) const = default;
};

// Throws Error{InvalidConfig} unless durations are positive, bpm_mean lies
// in [30,220], rmssd is non-negative and the affect weights are usable.
void validate(const ScenarioScript& s);

// rest, steady-exercise, fatigue-ramp, stress-spike, disengagement.
std::vector<std::string> bundled_scenario_names();
ScenarioScript bundled_scenario(std::string_view name, std::uint64_t seed = 1);

nlohmann::json to_json(const ScenarioScript& s);
ScenarioScript scenario_from_json(const nlohmann::json& j);
// A bundled name or a path to a JSON script.
ScenarioScript load_scenario(const std::string& name_or_path, std::uint64_t seed);

}  // namespace blexer::simkit
