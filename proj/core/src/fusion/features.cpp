#include "blexer/fusion/features.hpp"

#include <cmath>
#include <vector>

#include "blexer/common/error.hpp"
#include "blexer/fusion/hrv.hpp"

namespace blexer::fusion {

FeatureWindow extract_features(const std::deque<FusedFrame>& frames, const FeatureOptions& o) {
  if (frames.empty()) throw Error(Errc::NoUsableData, "frames", "no frames");
  const TimeMs newest = frames.back().t;
  const TimeMs oldest_allowed = newest - o.window_ms;

  std::vector<double> rr;
  double ecg_bpm_sum = 0.0, ppg_bpm_sum = 0.0;
  std::size_t ecg_bpm_n = 0, ppg_bpm_n = 0;
  std::vector<double> magnitudes;
  affect::Affect4 affect_sum;
  double neutral_sum = 0.0;
  std::size_t affect_n = 0;
  std::optional<TimeMs> first_fresh, last_fresh;

  for (const auto& f : frames) {
    if (f.t <= oldest_allowed) continue;
    if (!f.any_fresh()) continue;
    if (!first_fresh) first_fresh = f.t;
    last_fresh = f.t;

    if (!f.ecg.stale) {
      rr.insert(rr.end(), f.rr_recent.begin(), f.rr_recent.end());
      if (f.bpm_ecg && *f.bpm_ecg > 0) {
        ecg_bpm_sum += *f.bpm_ecg;
        ++ecg_bpm_n;
      }
    }
    if (!f.ppg.stale) {
      if (f.bpm_ppg && *f.bpm_ppg > 0 && f.ppg_confidence &&
          *f.ppg_confidence >= o.ppg_confidence_gate) {
        ppg_bpm_sum += *f.bpm_ppg;
        ++ppg_bpm_n;
      }
      if (f.accel_updated && f.accel) magnitudes.push_back(f.accel->magnitude());
    }
    if (!f.affect_status.stale && f.affect) {
      for (std::size_t i = 0; i < 4; ++i) affect_sum.p[i] += f.affect->p[i];
      neutral_sum += f.affect->neutral();
      ++affect_n;
    }
  }
  if (!first_fresh) throw Error(Errc::NoUsableData, "frames", "every stream is stale");

  FeatureWindow w;
  const auto& last = frames.back();
  w.t = newest;
  w.ecg_fresh = !last.ecg.stale;
  w.ppg_fresh = !last.ppg.stale;
  w.affect_fresh = !last.affect_status.stale;
  w.window_span_s = static_cast<double>(*last_fresh - *first_fresh) / 1000.0;
  w.rr_count = rr.size();
  if (rr.size() >= 2) {
    w.hrv_rmssd = rmssd(rr);
    w.hrv_sdnn = sdnn(rr);
  }
  if (ecg_bpm_n > 0) {
    w.hr_mean = ecg_bpm_sum / static_cast<double>(ecg_bpm_n);
  } else if (ppg_bpm_n > 0) {
    w.hr_mean = ppg_bpm_sum / static_cast<double>(ppg_bpm_n);
  }
  if (magnitudes.size() >= 3) w.motion_smoothness = motion_smoothness(magnitudes, o.jerk_gain);
  if (!magnitudes.empty()) {
    double mean = 0.0;
    for (double m : magnitudes) mean += m;
    mean /= static_cast<double>(magnitudes.size());
    double dev = 0.0;
    for (double m : magnitudes) dev += std::abs(m - mean);
    w.motion_activity = dev / static_cast<double>(magnitudes.size());
  }
  if (affect_n > 0) {
    double total = 0.0;
    for (double v : affect_sum.p) total += v;
    if (total > 0.0)
      for (double& v : affect_sum.p) v /= total;
    w.affect_dist = affect_sum;
    w.flatness = neutral_sum / static_cast<double>(affect_n);
  }
  return w;
}

void FrameHistory::push(FusedFrame f) {
  const TimeMs cutoff = f.t - options_.window_ms;
  frames_.push_back(std::move(f));
  while (!frames_.empty() && frames_.front().t <= cutoff) frames_.pop_front();
}

nlohmann::json to_json(const FeatureWindow& w) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["t"] = w.t;
  j["hrv_rmssd"] = opt(w.hrv_rmssd);
  j["hrv_sdnn"] = opt(w.hrv_sdnn);
  j["hr_mean"] = opt(w.hr_mean);
  j["motion_smoothness"] = opt(w.motion_smoothness);
  j["motion_activity"] = opt(w.motion_activity);
  j["affect_dist"] = w.affect_dist ? json(w.affect_dist->p) : json(nullptr);
  j["flatness"] = opt(w.flatness);
  j["window_span_s"] = w.window_span_s;
  j["rr_count"] = w.rr_count;
  return j;
}

}  // namespace blexer::fusion
