#pragma once

#include <optional>

#include "blexer/cam/types.hpp"
#include "blexer/fusion/features.hpp"
#include "blexer/ingest/baseline.hpp"

namespace blexer::cam {

struct InferenceInputs {
  const fusion::FeatureWindow* features = nullptr;  // null: no usable data
  ingest::Baseline baseline;
  std::optional<double> recent_success;  // mean of the last reports
  int difficulty = 1;
  TimeMs now = 0;
};

// Stage one: user-state inference. The shipped implementation is the
// weighted heuristic below; a learned temporal model plugs in here.
class StateInference {
 public:
  virtual ~StateInference() = default;
  virtual UserState infer(const InferenceInputs& in, const UserState* previous) = 0;
};

// Term values behind a fatigue estimate, exposed for tests and traces.
struct FatigueTerms {
  double hr_elevation = 0.0;
  double hrv_norm = 1.0;
  double smoothness = 1.0;
  double negative_affect = 0.0;
};

FatigueTerms fatigue_terms(const fusion::FeatureWindow& f, const ingest::Baseline& baseline,
                           const InferenceWeights& w);
double fatigue_index(const FatigueTerms& terms, const InferenceWeights& w);

// Weighted heuristic. Absent features contribute nothing; confidence is the
// fraction of fresh sensor streams, halved while the baseline is incomplete.
// With no usable data the previous state is carried with confidence 0.
UserState infer_state(const InferenceInputs& in, const InferenceWeights& w,
                      bool surprise_engaging = true, const UserState* previous = nullptr);

class HeuristicInference final : public StateInference {
 public:
  explicit HeuristicInference(RuleConfig config) : config_(std::move(config)) {}
  UserState infer(const InferenceInputs& in, const UserState* previous) override {
    return infer_state(in, config_.weights, config_.surprise_engaging, previous);
  }
  void set_config(RuleConfig c) { config_ = std::move(c); }

 private:
  RuleConfig config_;
};

}  // namespace blexer::cam
