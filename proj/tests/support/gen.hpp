#pragma once

// Random inputs for property tests.

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/cam/types.hpp"
#include "blexer/ipm/catalog.hpp"
#include "blexer/wire/envelope.hpp"

namespace gen {

using Eng = std::mt19937_64;

inline std::uint64_t below(Eng& g, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(g);
}
inline double real(Eng& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}
inline bool coin(Eng& g) { return below(g, 2) == 1; }

inline std::string text(Eng& g, std::size_t max_len = 24) {
  static const std::vector<std::string> pieces{
      "a", "b", "Z", "0", "9", " ", "_", "-", "\"", "\\", "\n", "\t", "/", "{", "]",
      "\xc3\xa9", "\xe2\x86\x92", "\xf0\x9f\x98\x80"};
  std::string s;
  const auto n = below(g, max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += pieces[below(g, pieces.size())];
  return s;
}

inline blexer::Vec3 vec3(Eng& g, double range) {
  return {real(g, -range, range), real(g, -range, range), real(g, -range, range)};
}

inline blexer::cam::TaskCategory category(Eng& g) {
  return blexer::cam::kAllCategories[below(g, 3)];
}

inline blexer::wire::Payload payload(Eng& g, blexer::wire::MsgType type) {
  using namespace blexer;
  using wire::MsgType;
  constexpr std::int64_t kTimeMax = std::numeric_limits<std::int64_t>::max();
  constexpr std::int64_t kIntMax = std::numeric_limits<int>::max();
  switch (type) {
    case MsgType::Hello: {
      wire::HelloMsg m;
      m.device_type = static_cast<wire::DeviceType>(below(g, 5));
      m.protocol_version = static_cast<int>(1 + below(g, coin(g) ? 3 : kIntMax));
      const auto n = 1 + below(g, 4);
      for (std::size_t i = 0; i < n; ++i) m.capabilities.insert(text(g, 8) + "c");
      return m;
    }
    case MsgType::Ack: {
      wire::AckMsg m;
      m.protocol_version = static_cast<int>(1 + below(g, 5));
      m.session_id = text(g);
      return m;
    }
    case MsgType::Ecg: {
      wire::EcgMsg m;
      m.bpm = static_cast<int>(below(g, 401));
      const auto n = below(g, 8);
      for (std::size_t i = 0; i < n; ++i) m.rr_raw.push_back(static_cast<std::uint32_t>(below(g, (1u << 20) + 1)));
      return m;
    }
    case MsgType::Ppg: {
      wire::PpgMsg m;
      m.bpm = static_cast<int>(below(g, 401));
      m.accel = vec3(g, coin(g) ? 16.0 : 1e6);
      m.confidence = coin(g) ? real(g, 0.0, 100.0) : static_cast<double>(below(g, 101));
      return m;
    }
    case MsgType::SkelAffect: {
      wire::SkelAffectMsg m;
      if (coin(g)) {
        std::vector<Vec3> joints;
        for (std::size_t i = 0; i < wire::kJointCount; ++i) joints.push_back(vec3(g, 3.0));
        m.joints = joints;
      }
      if (coin(g)) {
        std::array<double, 7> p{};
        for (auto& x : p) x = real(g, 0.0, 1.0);
        m.emotion7 = p;
      }
      if (coin(g)) m.face_detected = m.emotion7 ? coin(g) : false;
      return m;
    }
    case MsgType::Directive: {
      cam::Directive d;
      d.task_category = category(g);
      d.difficulty_target = static_cast<int>(below(g, 12)) - 1;
      d.repetitions = static_cast<int>(below(g, 40)) - 2;
      d.duration_s = real(g, -5.0, 600.0);
      d.pacing = static_cast<cam::Pacing>(below(g, 3));
      d.rest = coin(g);
      d.feedback_intensity = static_cast<cam::FeedbackIntensity>(below(g, 3));
      const auto n = below(g, 4);
      for (std::size_t i = 0; i < n; ++i) d.rationale.push_back(text(g, 6));
      d.issued_at = static_cast<TimeMs>(below(g, static_cast<std::uint64_t>(kTimeMax)));
      if (below(g, 4) == 0) {
        nlohmann::json v;
        switch (below(g, 3)) {
          case 0: v = static_cast<int>(below(g, 100)); break;
          case 1: v = text(g, 6); break;
          default: v = coin(g); break;
        }
        d.extensions["x_" + std::to_string(below(g, 1000))] = v.dump();
      }
      return d;
    }
    case MsgType::PerfReport: {
      ipm::PerformanceReport r;
      r.exercise_id = text(g, 10);
      r.category = category(g);
      r.success_rate = real(g, 0.0, 1.0);
      r.completion_time_s = real(g, 0.0, 900.0);
      r.errors = static_cast<int>(below(g, 50));
      r.reps_done = static_cast<int>(below(g, 50));
      r.ended_at = static_cast<TimeMs>(below(g, static_cast<std::uint64_t>(kTimeMax)));
      r.incomplete = coin(g);
      r.fallback = coin(g);
      return r;
    }
    case MsgType::Override: {
      iam::OverrideCommand c;
      c.kind = static_cast<iam::OverrideKind>(below(g, 5));
      if (c.kind == iam::OverrideKind::SetDifficulty) c.level = static_cast<int>(below(g, 20)) - 5;
      if (c.kind == iam::OverrideKind::SwitchCategory) c.category = category(g);
      c.issued_by = text(g, 8);
      c.t = static_cast<TimeMs>(below(g, 1ull << 50));
      return c;
    }
    case MsgType::Alert: {
      iam::Alert a;
      a.id = g();
      a.kind = static_cast<iam::AlertKind>(below(g, 3));
      a.severity = static_cast<iam::Severity>(below(g, 3));
      a.t = static_cast<TimeMs>(below(g, 1ull << 50));
      a.detail = text(g);
      a.acknowledged = coin(g);
      return a;
    }
    case MsgType::Heartbeat: return wire::HeartbeatMsg{};
    case MsgType::Bye: return wire::ByeMsg{text(g, 12)};
  }
  return wire::HeartbeatMsg{};
}

inline blexer::wire::Envelope envelope(Eng& g) {
  blexer::wire::Envelope e;
  e.seq = coin(g) ? below(g, 1000) : g();
  e.sent_at = static_cast<blexer::TimeMs>(below(g, static_cast<std::uint64_t>(INT64_MAX)));
  e.payload = payload(g, static_cast<blexer::wire::MsgType>(below(g, 11)));
  return e;
}

// Random plan quotas over the catalog's categories (at least one slot).
inline blexer::cam::TherapyPlan quota_plan(Eng& g, int max_per_category = 4) {
  blexer::cam::TherapyPlan plan;
  plan.quotas.clear();
  int total = 0;
  for (auto c : blexer::cam::kAllCategories) {
    const int q = static_cast<int>(below(g, static_cast<std::uint64_t>(max_per_category) + 1));
    plan.quotas[c] = q;
    total += q;
  }
  if (total == 0) plan.quotas[category(g)] = 1;
  return plan;
}

}  // namespace gen
