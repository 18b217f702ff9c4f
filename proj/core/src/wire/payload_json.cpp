#include "blexer/wire/payload_json.hpp"

#include <cmath>
#include <limits>

#include "blexer/common/error.hpp"

namespace blexer::wire {

namespace {

[[noreturn]] void violation(const std::string& field, const std::string& detail) {
  throw Error(Errc::SchemaViolation, field, detail);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) violation(path, "expected object");
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) violation(path + "." + key, "missing");
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::int64_t as_int(const json& v, const std::string& path, std::int64_t lo, std::int64_t hi) {
  std::int64_t x;
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      violation(path, "integer out of range");
    x = static_cast<std::int64_t>(u);
  } else if (v.is_number_integer()) {
    x = v.get<std::int64_t>();
  } else {
    violation(path, "expected integer");
  }
  if (x < lo || x > hi) violation(path, "integer out of range");
  return x;
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  violation(path, "expected non-negative integer");
}

double as_number(const json& v, const std::string& path, double lo, double hi) {
  if (!v.is_number()) violation(path, "expected number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < lo || x > hi) violation(path, "number out of range");
  return x;
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) violation(path, "expected boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) violation(path, "expected string");
  return v.get<std::string>();
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kIntMax = std::numeric_limits<std::int32_t>::max();
constexpr std::int64_t kTimeMax = std::numeric_limits<std::int64_t>::max();

Vec3 vec3_from(const json& v, const std::string& path, double limit) {
  if (!v.is_array() || v.size() != 3) violation(path, "expected [x,y,z]");
  return {as_number(v[0], path + "[0]", -limit, limit), as_number(v[1], path + "[1]", -limit, limit),
          as_number(v[2], path + "[2]", -limit, limit)};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

cam::TaskCategory category_from(const json& v, const std::string& path) {
  auto c = cam::parse_category(as_string(v, path));
  if (!c) violation(path, "unknown task category");
  return *c;
}

}  // namespace

json to_json(const HelloMsg& m) {
  return {{"device_type", to_string(m.device_type)},
          {"protocol_version", m.protocol_version},
          {"capabilities", m.capabilities}};
}

json to_json(const AckMsg& m) {
  return {{"protocol_version", m.protocol_version}, {"session_id", m.session_id}};
}

json to_json(const EcgMsg& m) { return {{"bpm", m.bpm}, {"rr_raw", m.rr_raw}}; }

json to_json(const PpgMsg& m) {
  return {{"bpm", m.bpm}, {"accel", vec3_to(m.accel)}, {"confidence", m.confidence}};
}

json to_json(const SkelAffectMsg& m) {
  json j = json::object();
  if (m.joints) {
    json arr = json::array();
    for (const auto& p : *m.joints) arr.push_back(vec3_to(p));
    j["joints"] = std::move(arr);
  }
  if (m.emotion7) j["emotion7"] = *m.emotion7;
  if (m.face_detected) j["face_detected"] = *m.face_detected;
  return j;
}

json to_json(const cam::Directive& d) {
  json j = json::object();
  // Extensions first so schema fields always win on a name clash.
  for (const auto& [k, text] : d.extensions) j[k] = json::parse(text, nullptr, false);
  j["task_category"] = cam::to_string(d.task_category);
  j["difficulty_target"] = d.difficulty_target;
  j["repetitions"] = d.repetitions;
  j["duration_s"] = d.duration_s;
  j["pacing"] = cam::to_string(d.pacing);
  j["rest"] = d.rest;
  j["feedback_intensity"] = cam::to_string(d.feedback_intensity);
  j["rationale"] = d.rationale;
  j["issued_at"] = d.issued_at;
  return j;
}

json to_json(const ipm::PerformanceReport& r) {
  return {{"exercise_id", r.exercise_id},
          {"category", cam::to_string(r.category)},
          {"success_rate", r.success_rate},
          {"completion_time_s", r.completion_time_s},
          {"errors", r.errors},
          {"reps_done", r.reps_done},
          {"ended_at", r.ended_at},
          {"incomplete", r.incomplete},
          {"fallback", r.fallback}};
}

json to_json(const iam::OverrideCommand& c) {
  json j = {{"kind", iam::to_string(c.kind)}, {"issued_by", c.issued_by}, {"t", c.t}};
  if (c.level) j["value"] = *c.level;
  if (c.category) j["value"] = cam::to_string(*c.category);
  return j;
}

json to_json(const iam::Alert& a) {
  return {{"id", a.id},
          {"kind", iam::to_string(a.kind)},
          {"severity", iam::to_string(a.severity)},
          {"t", a.t},
          {"detail", a.detail},
          {"acknowledged", a.acknowledged}};
}

json to_json(const HeartbeatMsg&) { return json::object(); }

json to_json(const ByeMsg& m) {
  json j = json::object();
  if (!m.reason.empty()) j["reason"] = m.reason;
  return j;
}

json payload_to_json(const Payload& p) {
  return std::visit([](const auto& m) { return to_json(m); }, p);
}

HelloMsg hello_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  HelloMsg m;
  const auto dev = as_string(field(j, "device_type", path), path + ".device_type");
  auto d = parse_device_type(dev);
  if (!d) violation(path + ".device_type", "unknown device type '" + dev + "'");
  m.device_type = *d;
  m.protocol_version =
      static_cast<int>(as_int(field(j, "protocol_version", path), path + ".protocol_version", 1, kIntMax));
  const auto& caps = field(j, "capabilities", path);
  if (!caps.is_array() || caps.empty()) violation(path + ".capabilities", "expected non-empty array");
  for (std::size_t i = 0; i < caps.size(); ++i)
    m.capabilities.insert(as_string(caps[i], path + ".capabilities[" + std::to_string(i) + "]"));
  return m;
}

AckMsg ack_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  AckMsg m;
  m.protocol_version =
      static_cast<int>(as_int(field(j, "protocol_version", path), path + ".protocol_version", 1, kIntMax));
  m.session_id = as_string(field(j, "session_id", path), path + ".session_id");
  return m;
}

EcgMsg ecg_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  EcgMsg m;
  m.bpm = static_cast<int>(as_int(field(j, "bpm", path), path + ".bpm", 0, 400));
  const auto& rr = field(j, "rr_raw", path);
  if (!rr.is_array()) violation(path + ".rr_raw", "expected array");
  m.rr_raw.reserve(rr.size());
  for (std::size_t i = 0; i < rr.size(); ++i)
    m.rr_raw.push_back(static_cast<std::uint32_t>(
        as_int(rr[i], path + ".rr_raw[" + std::to_string(i) + "]", 0, 1 << 20)));
  return m;
}

PpgMsg ppg_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  PpgMsg m;
  m.bpm = static_cast<int>(as_int(field(j, "bpm", path), path + ".bpm", 0, 400));
  m.accel = vec3_from(field(j, "accel", path), path + ".accel", 1e6);
  m.confidence = as_number(field(j, "confidence", path), path + ".confidence", 0.0, 100.0);
  return m;
}

SkelAffectMsg skel_affect_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  SkelAffectMsg m;
  if (const json* joints = optional_field(j, "joints")) {
    if (!joints->is_array() || joints->size() != kJointCount)
      violation(path + ".joints", "expected 25 joints");
    std::vector<Vec3> pts;
    pts.reserve(kJointCount);
    for (std::size_t i = 0; i < joints->size(); ++i)
      pts.push_back(vec3_from((*joints)[i], path + ".joints[" + std::to_string(i) + "]", 1e6));
    m.joints = std::move(pts);
  }
  if (const json* e = optional_field(j, "emotion7")) {
    if (!e->is_array() || e->size() != 7) violation(path + ".emotion7", "expected 7 probabilities");
    std::array<double, 7> p{};
    for (std::size_t i = 0; i < 7; ++i)
      p[i] = as_number((*e)[i], path + ".emotion7[" + std::to_string(i) + "]", 0.0, 1.0);
    m.emotion7 = p;
  }
  if (const json* f = optional_field(j, "face_detected")) {
    m.face_detected = as_bool(*f, path + ".face_detected");
  }
  if (m.face_detected.value_or(false) && !m.emotion7)
    violation(path + ".emotion7", "required when face_detected is true");
  return m;
}

cam::Directive directive_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  cam::Directive d;
  d.task_category = category_from(field(j, "task_category", path), path + ".task_category");
  d.difficulty_target = static_cast<int>(
      as_int(field(j, "difficulty_target", path), path + ".difficulty_target", -kIntMax, kIntMax));
  d.repetitions = static_cast<int>(
      as_int(field(j, "repetitions", path), path + ".repetitions", -kIntMax, kIntMax));
  d.duration_s = as_number(field(j, "duration_s", path), path + ".duration_s", -kInf, kInf);
  {
    auto p = cam::parse_pacing(as_string(field(j, "pacing", path), path + ".pacing"));
    if (!p) violation(path + ".pacing", "unknown pacing");
    d.pacing = *p;
  }
  d.rest = as_bool(field(j, "rest", path), path + ".rest");
  {
    auto f = cam::parse_feedback(
        as_string(field(j, "feedback_intensity", path), path + ".feedback_intensity"));
    if (!f) violation(path + ".feedback_intensity", "unknown feedback intensity");
    d.feedback_intensity = *f;
  }
  const auto& rationale = field(j, "rationale", path);
  if (!rationale.is_array()) violation(path + ".rationale", "expected array");
  for (std::size_t i = 0; i < rationale.size(); ++i)
    d.rationale.push_back(as_string(rationale[i], path + ".rationale[" + std::to_string(i) + "]"));
  d.issued_at = as_int(field(j, "issued_at", path), path + ".issued_at", 0, kTimeMax);

  static constexpr std::string_view kKnown[] = {
      "task_category", "difficulty_target", "repetitions", "duration_s", "pacing",
      "rest",          "feedback_intensity", "rationale",  "issued_at"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto k : kKnown) known = known || it.key() == k;
    if (!known) d.extensions[it.key()] = it.value().dump();
  }
  return d;
}

ipm::PerformanceReport report_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  ipm::PerformanceReport r;
  r.exercise_id = as_string(field(j, "exercise_id", path), path + ".exercise_id");
  r.category = category_from(field(j, "category", path), path + ".category");
  r.success_rate = as_number(field(j, "success_rate", path), path + ".success_rate", 0.0, 1.0);
  r.completion_time_s =
      as_number(field(j, "completion_time_s", path), path + ".completion_time_s", 0.0, kInf);
  r.errors = static_cast<int>(as_int(field(j, "errors", path), path + ".errors", 0, kIntMax));
  r.reps_done = static_cast<int>(as_int(field(j, "reps_done", path), path + ".reps_done", 0, kIntMax));
  r.ended_at = as_int(field(j, "ended_at", path), path + ".ended_at", 0, kTimeMax);
  if (const json* f = optional_field(j, "incomplete")) r.incomplete = as_bool(*f, path + ".incomplete");
  if (const json* f = optional_field(j, "fallback")) r.fallback = as_bool(*f, path + ".fallback");
  return r;
}

iam::OverrideCommand override_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  iam::OverrideCommand c;
  {
    const auto s = as_string(field(j, "kind", path), path + ".kind");
    auto k = iam::parse_override_kind(s);
    if (!k) violation(path + ".kind", "unknown override kind '" + s + "'");
    c.kind = *k;
  }
  if (c.kind == iam::OverrideKind::SetDifficulty) {
    c.level = static_cast<int>(as_int(field(j, "value", path), path + ".value", -kIntMax, kIntMax));
  } else if (c.kind == iam::OverrideKind::SwitchCategory) {
    c.category = category_from(field(j, "value", path), path + ".value");
  }
  if (const json* by = optional_field(j, "issued_by")) c.issued_by = as_string(*by, path + ".issued_by");
  if (const json* t = optional_field(j, "t")) c.t = as_int(*t, path + ".t", 0, kTimeMax);
  return c;
}

iam::Alert alert_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  iam::Alert a;
  if (const json* id = optional_field(j, "id")) a.id = as_u64(*id, path + ".id");
  {
    auto k = iam::parse_alert_kind(as_string(field(j, "kind", path), path + ".kind"));
    if (!k) violation(path + ".kind", "unknown alert kind");
    a.kind = *k;
  }
  {
    auto s = iam::parse_severity(as_string(field(j, "severity", path), path + ".severity"));
    if (!s) violation(path + ".severity", "unknown severity");
    a.severity = *s;
  }
  a.t = as_int(field(j, "t", path), path + ".t", 0, kTimeMax);
  a.detail = as_string(field(j, "detail", path), path + ".detail");
  if (const json* ack = optional_field(j, "acknowledged")) a.acknowledged = as_bool(*ack, path + ".acknowledged");
  return a;
}

Payload payload_from_json(MsgType type, const json& j, const std::string& path) {
  switch (type) {
    case MsgType::Hello: return hello_from_json(j, path);
    case MsgType::Ack: return ack_from_json(j, path);
    case MsgType::Ecg: return ecg_from_json(j, path);
    case MsgType::Ppg: return ppg_from_json(j, path);
    case MsgType::SkelAffect: return skel_affect_from_json(j, path);
    case MsgType::Directive: return directive_from_json(j, path);
    case MsgType::PerfReport: return report_from_json(j, path);
    case MsgType::Override: return override_from_json(j, path);
    case MsgType::Alert: return alert_from_json(j, path);
    case MsgType::Heartbeat:
      require_object(j, path);
      return HeartbeatMsg{};
    case MsgType::Bye: {
      require_object(j, path);
      ByeMsg m;
      if (const json* r = optional_field(j, "reason")) m.reason = as_string(*r, path + ".reason");
      return m;
    }
  }
  violation(path, "unhandled message type");
}

}  // namespace blexer::wire
