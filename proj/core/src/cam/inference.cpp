#include "blexer/cam/inference.hpp"

#include <algorithm>

namespace blexer::cam {

namespace {
double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

FatigueTerms fatigue_terms(const fusion::FeatureWindow& f, const ingest::Baseline& baseline,
                           const InferenceWeights& w) {
  FatigueTerms t;
  if (f.hr_mean && baseline.resting_bpm > 0.0) {
    const double relative = (*f.hr_mean - baseline.resting_bpm) / baseline.resting_bpm;
    t.hr_elevation = clamp01(relative / w.hr_elevation_scale);
  }
  if (f.hrv_rmssd) t.hrv_norm = clamp01(*f.hrv_rmssd / w.rmssd_norm_ms);
  if (f.motion_smoothness) t.smoothness = clamp01(*f.motion_smoothness);
  if (f.affect_dist) t.negative_affect = clamp01(f.affect_dist->negative());
  return t;
}

double fatigue_index(const FatigueTerms& t, const InferenceWeights& w) {
  return clamp01(w.fatigue_hr * t.hr_elevation + w.fatigue_hrv * (1.0 - t.hrv_norm) +
                 w.fatigue_motion * (1.0 - t.smoothness) + w.fatigue_affect * t.negative_affect);
}

UserState infer_state(const InferenceInputs& in, const InferenceWeights& w, bool surprise_engaging,
                      const UserState* previous) {
  if (in.features == nullptr) {
    UserState carried = previous ? *previous : UserState{};
    carried.confidence = 0.0;
    carried.t = in.now;
    return carried;
  }
  const auto& f = *in.features;
  const FatigueTerms terms = fatigue_terms(f, in.baseline, w);

  UserState s;
  s.t = in.now;
  s.fatigue = fatigue_index(terms, w);

  // Engagement averages the terms that have evidence behind them; with all
  // three present this is the plain weighted sum.
  const double success = in.recent_success.value_or(0.5);
  double num = w.engagement_success * success;
  double den = w.engagement_success;
  if (f.flatness) {
    num += w.engagement_flatness * (1.0 - *f.flatness);
    den += w.engagement_flatness;
  }
  if (f.affect_dist) {
    double lively = f.affect_dist->positive();
    if (surprise_engaging) lively += f.affect_dist->surprise();
    num += w.engagement_affect * lively;
    den += w.engagement_affect;
  }
  const double full = w.engagement_success + w.engagement_flatness + w.engagement_affect;
  s.engagement = clamp01(den > 0.0 ? num * (full / den) : 0.0);

  s.workload = clamp01(w.workload_hr * terms.hr_elevation +
                       w.workload_difficulty * static_cast<double>(in.difficulty) / 10.0);

  const int fresh = int(f.ecg_fresh) + int(f.ppg_fresh) + int(f.affect_fresh);
  s.confidence = static_cast<double>(fresh) / 3.0;
  if (!in.baseline.complete) s.confidence *= 0.5;
  return s;
}

}  // namespace blexer::cam
