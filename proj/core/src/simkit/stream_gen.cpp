#include "blexer/simkit/stream_gen.hpp"

#include <algorithm>

#include "blexer/common/hash.hpp"
#include "blexer/simkit/physiology.hpp"
#include "blexer/wire/codec.hpp"

namespace blexer::simkit {

namespace {

int device_rank(wire::DeviceType d) {
  switch (d) {
    case wire::DeviceType::EcgChest: return 0;
    case wire::DeviceType::PpgWrist: return 1;
    default: return 2;
  }
}

struct PhaseAt {
  const ScenarioPhase* phase;
  double offset_s;  // seconds into the phase
};

PhaseAt phase_at(const ScenarioScript& s, double t_s) {
  double begin = 0.0;
  for (const auto& p : s.phases) {
    if (t_s < begin + p.duration_s) return {&p, t_s - begin};
    begin += p.duration_s;
  }
  return {&s.phases.back(), s.phases.back().duration_s};
}

PhysioTargets targets_at(const ScenarioScript& s, double t_s) {
  const PhaseAt at = phase_at(s, t_s);
  const ScenarioPhase& p = *at.phase;
  PhysioTargets t;
  t.bpm = std::clamp(p.bpm_mean + p.bpm_slope * (at.offset_s - p.duration_s / 2.0), 30.0, 220.0);
  t.rmssd_ms = p.rmssd_target_ms;
  t.affect_profile = p.affect_profile;
  t.jerk = p.accel_pattern == AccelPattern::Smooth ? 0.05 : 0.8;
  t.confidence = p.confidence_level;
  return t;
}

}  // namespace

std::vector<TimedEnvelope> generate_stream(const ScenarioScript& script, const StreamOptions& o) {
  validate(script);
  SignalSynth synth(script.seed);
  const TimeMs total_ms = static_cast<TimeMs>(script.duration_s() * 1000.0);
  const wire::DeviceType devices[] = {wire::DeviceType::EcgChest, wire::DeviceType::PpgWrist,
                                      wire::DeviceType::Mocap};
  std::uint64_t seq[3] = {1, 1, 1};
  std::vector<TimedEnvelope> out;

  auto push = [&](int i, TimeMs t, wire::Payload p) {
    wire::Envelope env{seq[i]++, o.start_ms + t, std::move(p)};
    out.push_back({o.start_ms + t, devices[i], std::move(env)});
  };

  if (o.control) {
    push(0, 0, wire::HelloMsg{wire::DeviceType::EcgChest, wire::kProtocolVersion, {"ECG"}});
    push(1, 0, wire::HelloMsg{wire::DeviceType::PpgWrist, wire::kProtocolVersion, {"PPG"}});
    push(2, 0, wire::HelloMsg{wire::DeviceType::Mocap, wire::kProtocolVersion, {"SKEL_AFFECT"}});
  }
  // Affect runs at the base rate; ECG and PPG on every fifth step.
  for (TimeMs t = kAffectPeriodMs; t <= total_ms; t += kAffectPeriodMs) {
    const PhysioTargets targets = targets_at(script, static_cast<double>(t) / 1000.0);
    if (t % kEcgPeriodMs == 0) push(0, t, synth.ecg(targets, kEcgPeriodMs));
    if (t % kPpgPeriodMs == 0) push(1, t, synth.ppg(targets));
    push(2, t, synth.affect(targets, o.start_ms + t, o.joints));
  }
  if (o.control)
    for (int i = 0; i < 3; ++i) push(i, total_ms, wire::ByeMsg{"scenario complete"});

  std::stable_sort(out.begin(), out.end(), [](const TimedEnvelope& a, const TimedEnvelope& b) {
    if (a.t != b.t) return a.t < b.t;
    return device_rank(a.device) < device_rank(b.device);
  });
  return out;
}

std::uint64_t stream_hash(const std::vector<TimedEnvelope>& stream) {
  Fnv1a h;
  for (const auto& e : stream) {
    h.update(wire::to_string(e.device));
    h.update(std::to_string(e.t));
    h.update(wire::encode(e.env));
  }
  return h.digest();
}

}  // namespace blexer::simkit
