#include "blexer/cam/config_io.hpp"

#include <fstream>

#include "blexer/common/error.hpp"

namespace blexer::cam {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(Errc::InvalidConfig, field, why);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    invalid(key, e.what());
  }
}

std::map<TaskCategory, int> read_category_map(const json& j, const char* key,
                                              std::map<TaskCategory, int> fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_object()) invalid(key, "expected object keyed by task category");
  std::map<TaskCategory, int> out;
  for (auto e = it->begin(); e != it->end(); ++e) {
    auto c = parse_category(e.key());
    if (!c) invalid(key, "unknown task category '" + e.key() + "'");
    if (!e.value().is_number_integer()) invalid(key, "expected integer counts");
    out[*c] = e.value().get<int>();
  }
  return out;
}

json category_map_json(const std::map<TaskCategory, int>& m) {
  json j = json::object();
  for (const auto& [c, n] : m) j[std::string(to_string(c))] = n;
  return j;
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid(path.string(), "cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    invalid(path.string(), e.what());
  }
}

}  // namespace

json to_json(const UserState& s) {
  return {{"t", s.t},
          {"workload", s.workload},
          {"engagement", s.engagement},
          {"fatigue", s.fatigue},
          {"confidence", s.confidence}};
}

UserState user_state_from_json(const json& j) {
  UserState s;
  read(j, "t", s.t);
  read(j, "workload", s.workload);
  read(j, "engagement", s.engagement);
  read(j, "fatigue", s.fatigue);
  read(j, "confidence", s.confidence);
  return s;
}

json to_json(const TherapyPlan& p) {
  json prefs = json::array();
  for (auto c : p.preferences) prefs.push_back(to_string(c));
  return {{"schema_version", p.schema_version},
          {"quotas", category_map_json(p.quotas)},
          {"fatigue_threshold", p.fatigue_threshold},
          {"engagement_threshold", p.engagement_threshold},
          {"max_difficulty", p.max_difficulty},
          {"start_difficulty", p.start_difficulty},
          {"session_cap_s", p.session_cap_s},
          {"preferences", prefs},
          {"excluded_exercises", p.excluded_exercises}};
}

TherapyPlan plan_from_json(const json& j) {
  if (!j.is_object()) invalid("plan", "expected object");
  TherapyPlan p;
  read(j, "schema_version", p.schema_version);
  if (p.schema_version != kPlanSchemaVersion) invalid("schema_version", "unsupported version");
  p.quotas = read_category_map(j, "quotas", p.quotas);
  read(j, "fatigue_threshold", p.fatigue_threshold);
  read(j, "engagement_threshold", p.engagement_threshold);
  read(j, "max_difficulty", p.max_difficulty);
  read(j, "start_difficulty", p.start_difficulty);
  read(j, "session_cap_s", p.session_cap_s);
  if (auto it = j.find("preferences"); it != j.end()) {
    if (!it->is_array()) invalid("preferences", "expected array");
    p.preferences.clear();
    for (const auto& v : *it) {
      auto c = v.is_string() ? parse_category(v.get<std::string>()) : std::nullopt;
      if (!c) invalid("preferences", "unknown task category");
      p.preferences.push_back(*c);
    }
  }
  read(j, "excluded_exercises", p.excluded_exercises);
  validate(p);
  return p;
}

json to_json(const RuleConfig& c) {
  const auto& w = c.weights;
  return {{"version", c.version},
          {"success_high", c.success_high},
          {"success_low", c.success_low},
          {"dwell_s", static_cast<double>(c.dwell_ms) / 1000.0},
          {"report_window", c.report_window},
          {"seconds_per_rep", c.seconds_per_rep},
          {"surprise_engaging", c.surprise_engaging},
          {"base_reps", category_map_json(c.base_reps)},
          {"weights",
           {{"fatigue_hr", w.fatigue_hr},
            {"fatigue_hrv", w.fatigue_hrv},
            {"fatigue_motion", w.fatigue_motion},
            {"fatigue_affect", w.fatigue_affect},
            {"engagement_flatness", w.engagement_flatness},
            {"engagement_success", w.engagement_success},
            {"engagement_affect", w.engagement_affect},
            {"workload_hr", w.workload_hr},
            {"workload_difficulty", w.workload_difficulty},
            {"hr_elevation_scale", w.hr_elevation_scale},
            {"rmssd_norm_ms", w.rmssd_norm_ms}}}};
}

RuleConfig rule_config_from_json(const json& j) {
  if (!j.is_object()) invalid("rules", "expected object");
  RuleConfig c;
  read(j, "version", c.version);
  if (c.version != kRuleConfigVersion) invalid("version", "unsupported version");
  read(j, "success_high", c.success_high);
  read(j, "success_low", c.success_low);
  double dwell_s = static_cast<double>(c.dwell_ms) / 1000.0;
  read(j, "dwell_s", dwell_s);
  c.dwell_ms = static_cast<TimeMs>(dwell_s * 1000.0);
  read(j, "report_window", c.report_window);
  read(j, "seconds_per_rep", c.seconds_per_rep);
  read(j, "surprise_engaging", c.surprise_engaging);
  c.base_reps = read_category_map(j, "base_reps", c.base_reps);
  if (auto it = j.find("weights"); it != j.end()) {
    if (!it->is_object()) invalid("weights", "expected object");
    auto& w = c.weights;
    read(*it, "fatigue_hr", w.fatigue_hr);
    read(*it, "fatigue_hrv", w.fatigue_hrv);
    read(*it, "fatigue_motion", w.fatigue_motion);
    read(*it, "fatigue_affect", w.fatigue_affect);
    read(*it, "engagement_flatness", w.engagement_flatness);
    read(*it, "engagement_success", w.engagement_success);
    read(*it, "engagement_affect", w.engagement_affect);
    read(*it, "workload_hr", w.workload_hr);
    read(*it, "workload_difficulty", w.workload_difficulty);
    read(*it, "hr_elevation_scale", w.hr_elevation_scale);
    read(*it, "rmssd_norm_ms", w.rmssd_norm_ms);
  }
  validate(c);
  return c;
}

TherapyPlan load_plan(const std::filesystem::path& path) { return plan_from_json(read_file(path)); }

RuleConfig load_rule_config(const std::filesystem::path& path) {
  return rule_config_from_json(read_file(path));
}

}  // namespace blexer::cam
