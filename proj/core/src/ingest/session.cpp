#include "blexer/ingest/session.hpp"

#include <algorithm>
#include <cmath>

#include "blexer/common/error.hpp"
#include "blexer/wire/payload_json.hpp"

namespace blexer::ingest {

std::string_view to_string(Stream s) noexcept {
  switch (s) {
    case Stream::Ecg: return "ECG";
    case Stream::Ppg: return "PPG";
    case Stream::Affect: return "SKEL_AFFECT";
  }
  return "?";
}

TimeMs hub_ts_of(const Sample& s) {
  return std::visit([](const auto& x) { return x.hub_ts; }, s);
}

Stream stream_of(const Sample& s) { return static_cast<Stream>(s.index()); }

// ---------------------------------------------------------------- baseline

const Baseline& BaselineTracker::update(int bpm, TimeMs t) {
  if (baseline_.complete) return baseline_;
  if (!start_) start_ = t;
  tick(t);
  if (baseline_.complete || bpm <= 0) return baseline_;
  sum_ += bpm;
  ++count_;
  baseline_.resting_bpm = sum_ / static_cast<double>(count_);
  baseline_.calib_duration_s = static_cast<double>(t - *start_) / 1000.0;
  return baseline_;
}

const Baseline& BaselineTracker::tick(TimeMs t) {
  if (baseline_.complete || !start_) return baseline_;
  if (t - *start_ >= kCalibrationMs && count_ > 0) {
    baseline_.calib_duration_s = static_cast<double>(kCalibrationMs) / 1000.0;
    baseline_.complete = true;
  }
  return baseline_;
}

// ----------------------------------------------------------------- session

std::optional<Stream> stream_for(wire::DeviceType device) {
  switch (device) {
    case wire::DeviceType::EcgChest: return Stream::Ecg;
    case wire::DeviceType::PpgWrist: return Stream::Ppg;
    case wire::DeviceType::Mocap: return Stream::Affect;
    default: return std::nullopt;
  }
}

std::optional<Stream> stream_for(wire::MsgType type) {
  switch (type) {
    case wire::MsgType::Ecg: return Stream::Ecg;
    case wire::MsgType::Ppg: return Stream::Ppg;
    case wire::MsgType::SkelAffect: return Stream::Affect;
    default: return std::nullopt;
  }
}

double nominal_rate_hz(Stream s) {
  switch (s) {
    case Stream::Ecg: return 1.0;
    case Stream::Ppg: return 1.0;
    case Stream::Affect: return 5.0;
  }
  return 1.0;
}

namespace {

std::size_t ring_capacity_for(Stream s, const SessionOptions& o) {
  if (o.ring_capacity > 0) return o.ring_capacity;
  return static_cast<std::size_t>(std::ceil(nominal_rate_hz(s) * 600.0));
}

Stream require_sensor_stream(wire::DeviceType device) {
  auto s = stream_for(device);
  if (!s)
    throw Error(Errc::WrongStream, "device_type",
                std::string(wire::to_string(device)) + " is not a sensor device");
  return *s;
}

double clamp_g(double v) { return std::clamp(v, -kAccelLimitG, kAccelLimitG); }

}  // namespace

SensorSession::SensorSession(std::string session_id, wire::DeviceType device,
                             SessionOptions options, Forward forward, EventSink* log)
    : id_(std::move(session_id)),
      device_(device),
      stream_(require_sensor_stream(device)),
      options_(options),
      forward_(std::move(forward)),
      log_(log),
      ring_(ring_capacity_for(stream_, options_)) {}

EcgSample SensorSession::normalize_ecg(const wire::EcgMsg& m) {
  EcgSample s;
  s.bpm = m.bpm;
  s.rr_raw = m.rr_raw;
  std::vector<double> converted;
  converted.reserve(m.rr_raw.size());
  std::size_t non_positive = 0;
  for (auto raw : m.rr_raw) {
    if (raw == 0) {
      ++non_positive;
      continue;
    }
    converted.push_back(rr_to_ms(raw));
  }

  auto result = reject_artifacts(converted, options_.artifacts, rr_reference_);
  if (!result.kept.empty()) {
    rr_reference_ = result.kept.back();
    consecutive_jumps_ = 0;
  } else {
    // Count in-range intervals rejected only because they jumped; after
    // enough of them the old reference is no longer meaningful.
    for (double rr : converted) {
      if (rr >= options_.artifacts.min_ms && rr <= options_.artifacts.max_ms) {
        if (++consecutive_jumps_ >= options_.reference_reset_after) {
          rr_reference_ = rr;
          consecutive_jumps_ = 0;
        }
      }
    }
  }
  s.rr_ms = std::move(result.kept);
  s.rr_dropped = result.dropped + non_positive;
  return s;
}

Sample SensorSession::normalize(const wire::Envelope& env, TimeMs hub_ts) {
  switch (env.type()) {
    case wire::MsgType::Ecg: {
      EcgSample s = normalize_ecg(std::get<wire::EcgMsg>(env.payload));
      s.seq = env.seq;
      s.device_ts = env.sent_at;
      s.hub_ts = hub_ts;
      return s;
    }
    case wire::MsgType::Ppg: {
      const auto& m = std::get<wire::PpgMsg>(env.payload);
      PpgSample s;
      s.seq = env.seq;
      s.bpm = m.bpm;
      s.accel = {clamp_g(m.accel.x), clamp_g(m.accel.y), clamp_g(m.accel.z)};
      s.confidence = std::clamp(m.confidence, 0.0, 100.0);
      s.device_ts = env.sent_at;
      s.hub_ts = hub_ts;
      return s;
    }
    case wire::MsgType::SkelAffect: {
      const auto& m = std::get<wire::SkelAffectMsg>(env.payload);
      AffectSample s;
      s.seq = env.seq;
      s.has_joints = m.joints.has_value();
      if (m.emotion7) s.emotion = affect::Emotion7{*m.emotion7};
      if (m.face_detected.value_or(false) && s.emotion) s.affect = affect::reduce(*s.emotion);
      s.device_ts = env.sent_at;
      s.hub_ts = hub_ts;
      return s;
    }
    default:
      throw Error(Errc::WrongStream, "msg_type", "not a sensor message");
  }
}

std::vector<Sample> SensorSession::accept_packet(const wire::Envelope& env, TimeMs hub_ts,
                                                 std::uint64_t recv_ns) {
  if (!active_) throw Error(Errc::ProtocolViolation, "session", "session " + id_ + " is closed");
  const auto msg_stream = stream_for(env.type());
  if (!msg_stream || *msg_stream != stream_) {
    ++counters_.wrong_stream;
    throw Error(Errc::WrongStream, "msg_type",
                std::string(wire::to_string(env.type())) + " on a " +
                    std::string(to_string(stream_)) + " session");
  }
  if (max_device_ts_ && env.sent_at < *max_device_ts_ - options_.max_regress_ms) {
    ++counters_.stale_dropped;
    throw Error(Errc::StaleTimestamp, "sent_at",
                "device clock regressed by " + std::to_string(*max_device_ts_ - env.sent_at) + " ms");
  }

  Sample sample = normalize(env, hub_ts);
  max_device_ts_ = std::max(max_device_ts_.value_or(env.sent_at), env.sent_at);

  NormalizedItem item{sample, std::nullopt, recv_ns};
  if (const auto* ecg = std::get_if<EcgSample>(&sample)) {
    counters_.rr_dropped += ecg->rr_dropped;
    item.baseline = update_baseline(ecg->bpm, hub_ts);
  } else if (const auto* ppg = std::get_if<PpgSample>(&sample)) {
    item.baseline = update_baseline(ppg->bpm, hub_ts);
  }

  ring_.push(sample);
  ++counters_.accepted;
  if (log_) {
    auto record = sample_to_json(sample);
    record["session"] = id_;
    log_->append(LogStream::Raw, record);
  }
  if (forward_) forward_(std::move(item));
  return {std::move(sample)};
}

nlohmann::json sample_to_json(const Sample& s) {
  using nlohmann::json;
  json j;
  j["stream"] = to_string(stream_of(s));
  std::visit(
      [&](const auto& x) {
        j["seq"] = x.seq;
        j["device_ts"] = x.device_ts;
        j["hub_ts"] = x.hub_ts;
      },
      s);
  if (const auto* e = std::get_if<EcgSample>(&s)) {
    j["bpm"] = e->bpm;
    j["rr_raw"] = e->rr_raw;
    j["rr_ms"] = e->rr_ms;
    j["rr_dropped"] = e->rr_dropped;
  } else if (const auto* p = std::get_if<PpgSample>(&s)) {
    j["bpm"] = p->bpm;
    j["accel"] = json::array({p->accel.x, p->accel.y, p->accel.z});
    j["confidence"] = p->confidence;
  } else if (const auto* a = std::get_if<AffectSample>(&s)) {
    if (a->emotion) j["emotion7"] = a->emotion->p;
    j["face_detected"] = a->affect.has_value();
    if (a->affect) j["affect4"] = a->affect->p;
    j["joints"] = a->has_joints;
  }
  return j;
}

std::optional<Sample> sample_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("stream")) return std::nullopt;
  const std::string stream = j.at("stream").get<std::string>();
  auto stamp = [&](auto& x) {
    x.seq = j.at("seq").get<std::uint64_t>();
    x.device_ts = j.at("device_ts").get<TimeMs>();
    x.hub_ts = j.at("hub_ts").get<TimeMs>();
  };
  if (stream == to_string(Stream::Ecg)) {
    EcgSample e;
    stamp(e);
    e.bpm = j.at("bpm").get<int>();
    e.rr_raw = j.at("rr_raw").get<std::vector<std::uint32_t>>();
    e.rr_ms = j.at("rr_ms").get<std::vector<double>>();
    e.rr_dropped = j.at("rr_dropped").get<std::size_t>();
    return e;
  }
  if (stream == to_string(Stream::Ppg)) {
    PpgSample p;
    stamp(p);
    p.bpm = j.at("bpm").get<int>();
    const auto a = j.at("accel").get<std::array<double, 3>>();
    p.accel = {a[0], a[1], a[2]};
    p.confidence = j.at("confidence").get<double>();
    return p;
  }
  if (stream == to_string(Stream::Affect)) {
    AffectSample a;
    stamp(a);
    if (j.contains("emotion7")) a.emotion = affect::Emotion7{j.at("emotion7").get<std::array<double, 7>>()};
    if (j.contains("affect4")) a.affect = affect::Affect4{j.at("affect4").get<std::array<double, 4>>()};
    a.has_joints = j.value("joints", false);
    return a;
  }
  return std::nullopt;
}

}  // namespace blexer::ingest
