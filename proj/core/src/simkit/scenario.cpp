#include "blexer/simkit/scenario.hpp"

#include <cmath>
#include <fstream>

#include "blexer/common/error.hpp"

namespace blexer::simkit {

using nlohmann::json;

std::string_view to_string(AccelPattern p) noexcept {
  return p == AccelPattern::Smooth ? "smooth" : "jerky";
}

double ScenarioScript::duration_s() const {
  double s = 0.0;
  for (const auto& p : phases) s += p.duration_s;
  return s;
}

void validate(const ScenarioScript& s) {
  auto bad = [&](std::size_t i, const char* field, const char* why) {
    throw Error(Errc::InvalidConfig, "phases[" + std::to_string(i) + "]." + field, why);
  };
  if (s.phases.empty()) throw Error(Errc::InvalidConfig, "phases", "at least one phase required");
  for (std::size_t i = 0; i < s.phases.size(); ++i) {
    const auto& p = s.phases[i];
    if (!(p.duration_s > 0.0)) bad(i, "duration_s", "must be positive");
    if (!(p.bpm_mean >= 30.0 && p.bpm_mean <= 220.0)) bad(i, "bpm_mean", "must lie in [30,220]");
    if (!std::isfinite(p.bpm_slope)) bad(i, "bpm_slope", "must be finite");
    if (!(p.rmssd_target_ms >= 0.0)) bad(i, "rmssd_target_ms", "must be non-negative");
    if (!(p.confidence_level >= 0.0 && p.confidence_level <= 100.0))
      bad(i, "confidence_level", "must lie in [0,100]");
    double sum = 0.0;
    for (double w : p.affect_profile) {
      if (!(w >= 0.0)) bad(i, "affect_profile", "weights must be non-negative");
      sum += w;
    }
    if (!(sum > 0.0)) bad(i, "affect_profile", "weights must not all be zero");
  }
}

namespace {

constexpr std::array<double, 7> kCalm{0.02, 0.01, 0.02, 0.25, 0.05, 0.05, 0.60};
constexpr std::array<double, 7> kCheerful{0.01, 0.01, 0.01, 0.45, 0.03, 0.09, 0.40};
constexpr std::array<double, 7> kStrained{0.05, 0.05, 0.05, 0.20, 0.15, 0.05, 0.45};
constexpr std::array<double, 7> kExhausted{0.12, 0.10, 0.12, 0.06, 0.30, 0.05, 0.25};
constexpr std::array<double, 7> kStartled{0.05, 0.02, 0.30, 0.03, 0.10, 0.30, 0.20};
constexpr std::array<double, 7> kFlat{0.005, 0.005, 0.005, 0.02, 0.02, 0.005, 0.94};

ScenarioPhase phase(double dur, double bpm, double slope, double rmssd,
                    std::array<double, 7> affect, AccelPattern accel, double conf) {
  return {dur, bpm, slope, rmssd, affect, accel, conf};
}

ScenarioPhase calibration() {
  return phase(60, 65, 0, 50, kCalm, AccelPattern::Smooth, 92);
}

}  // namespace

std::vector<std::string> bundled_scenario_names() {
  return {"rest", "steady-exercise", "fatigue-ramp", "stress-spike", "disengagement"};
}

ScenarioScript bundled_scenario(std::string_view name, std::uint64_t seed) {
  using A = AccelPattern;
  ScenarioScript s;
  s.name = std::string(name);
  s.seed = seed;
  if (name == "rest") {
    s.phases = {phase(300, 60, 0, 50, kCalm, A::Smooth, 92)};
  } else if (name == "steady-exercise") {
    s.phases = {calibration(), phase(540, 95, 0, 35, kCheerful, A::Smooth, 85)};
  } else if (name == "fatigue-ramp") {
    s.phases = {calibration(), phase(120, 85, 0.1, 25, kStrained, A::Jerky, 80),
                phase(90, 118, 0.05, 10, kExhausted, A::Jerky, 75)};
  } else if (name == "stress-spike") {
    s.phases = {calibration(), phase(120, 75, 0, 40, kCalm, A::Smooth, 90),
                phase(60, 130, 0, 12, kStartled, A::Jerky, 70),
                phase(120, 78, -0.1, 35, kCalm, A::Smooth, 90)};
  } else if (name == "disengagement") {
    s.phases = {calibration(), phase(540, 70, 0, 45, kFlat, A::Smooth, 90)};
  } else {
    throw Error(Errc::InvalidConfig, "scenario", "unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

json to_json(const ScenarioScript& s) {
  json phases = json::array();
  for (const auto& p : s.phases)
    phases.push_back({{"duration_s", p.duration_s},
                      {"bpm_mean", p.bpm_mean},
                      {"bpm_slope", p.bpm_slope},
                      {"rmssd_target_ms", p.rmssd_target_ms},
                      {"affect_profile", p.affect_profile},
                      {"accel_pattern", to_string(p.accel_pattern)},
                      {"confidence_level", p.confidence_level}});
  return {{"name", s.name}, {"seed", s.seed}, {"phases", phases}};
}

ScenarioScript scenario_from_json(const json& j) {
  ScenarioScript s;
  try {
    s.name = j.value("name", std::string("custom"));
    s.seed = j.value("seed", std::uint64_t{1});
    for (const auto& pj : j.at("phases")) {
      ScenarioPhase p;
      p.duration_s = pj.at("duration_s").get<double>();
      p.bpm_mean = pj.at("bpm_mean").get<double>();
      p.bpm_slope = pj.value("bpm_slope", 0.0);
      p.rmssd_target_ms = pj.value("rmssd_target_ms", p.rmssd_target_ms);
      if (pj.contains("affect_profile"))
        p.affect_profile = pj.at("affect_profile").get<std::array<double, 7>>();
      const std::string accel = pj.value("accel_pattern", std::string("smooth"));
      if (accel == "smooth")
        p.accel_pattern = AccelPattern::Smooth;
      else if (accel == "jerky")
        p.accel_pattern = AccelPattern::Jerky;
      else
        throw Error(Errc::InvalidConfig, "accel_pattern", "expected smooth or jerky");
      p.confidence_level = pj.value("confidence_level", p.confidence_level);
      s.phases.push_back(p);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, "scenario", e.what());
  }
  validate(s);
  return s;
}

ScenarioScript load_scenario(const std::string& name_or_path, std::uint64_t seed) {
  for (const auto& n : bundled_scenario_names())
    if (n == name_or_path) return bundled_scenario(n, seed);
  std::ifstream in(name_or_path);
  if (!in) throw Error(Errc::InvalidConfig, "scenario", "no bundled scenario or file '" + name_or_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidConfig, name_or_path, e.what());
  }
  ScenarioScript s = scenario_from_json(j);
  s.seed = seed;
  return s;
}

}  // namespace blexer::simkit
