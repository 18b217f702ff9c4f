#include "blexer/fusion/aligner.hpp"

#include <algorithm>

namespace blexer::fusion {

namespace {

StreamStatus status_at(std::optional<TimeMs> last, TimeMs t) {
  StreamStatus s;
  if (!last) return s;
  s.staleness_ms = std::max<TimeMs>(0, t - *last);
  s.stale = *s.staleness_ms > kStaleAfterMs;
  return s;
}

nlohmann::json status_json(const StreamStatus& s) {
  nlohmann::json j;
  j["staleness_ms"] = s.staleness_ms ? nlohmann::json(*s.staleness_ms) : nlohmann::json(nullptr);
  j["stale"] = s.stale;
  return j;
}

}  // namespace

void Aligner::ingest(const ingest::Sample& sample) {
  if (const auto* e = std::get_if<ingest::EcgSample>(&sample)) {
    ecg_ = EcgHold{e->bpm, e->hub_ts};
    pending_rr_.insert(pending_rr_.end(), e->rr_ms.begin(), e->rr_ms.end());
  } else if (const auto* p = std::get_if<ingest::PpgSample>(&sample)) {
    ppg_ = PpgHold{p->bpm, p->accel, p->confidence, p->hub_ts};
    ppg_updated_ = true;
  } else if (const auto* a = std::get_if<ingest::AffectSample>(&sample)) {
    // Frames without a detected face carry the previous affect forward.
    if (a->affect && affect_window_.push(a->hub_ts, *a->affect)) affect_at_ = a->hub_ts;
  }
}

FusedFrame Aligner::tick(TimeMs t) {
  FusedFrame f;
  f.t = t;
  f.ecg = status_at(ecg_ ? std::optional<TimeMs>(ecg_->at) : std::nullopt, t);
  f.ppg = status_at(ppg_ ? std::optional<TimeMs>(ppg_->at) : std::nullopt, t);
  f.affect_status = status_at(affect_at_, t);
  if (ecg_) f.bpm_ecg = ecg_->bpm;
  if (ppg_) {
    f.bpm_ppg = ppg_->bpm;
    f.ppg_confidence = ppg_->confidence;
    f.accel = ppg_->accel;
  }
  f.accel_updated = ppg_updated_;
  if (!affect_window_.empty()) f.affect = affect::smooth(affect_window_);
  f.rr_recent = std::move(pending_rr_);
  pending_rr_.clear();
  ppg_updated_ = false;
  return f;
}

nlohmann::json to_json(const FusedFrame& f) {
  using nlohmann::json;
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["t"] = f.t;
  j["bpm_ecg"] = opt(f.bpm_ecg);
  j["bpm_ppg"] = opt(f.bpm_ppg);
  j["ppg_confidence"] = opt(f.ppg_confidence);
  j["rr_recent"] = f.rr_recent;
  j["accel"] = f.accel ? json::array({f.accel->x, f.accel->y, f.accel->z}) : json(nullptr);
  j["accel_updated"] = f.accel_updated;
  j["affect"] = f.affect ? json(f.affect->p) : json(nullptr);
  j["staleness"] = {{"ecg", status_json(f.ecg)},
                    {"ppg", status_json(f.ppg)},
                    {"affect", status_json(f.affect_status)}};
  return j;
}

}  // namespace blexer::fusion
