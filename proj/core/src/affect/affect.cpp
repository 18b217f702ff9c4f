#include "blexer/affect/affect.hpp"

#include <cmath>

#include "blexer/common/error.hpp"

namespace blexer::affect {

std::string_view to_string(Emotion e) noexcept {
  static constexpr std::string_view kNames[] = {"anger",   "disgust",  "fear",   "happiness",
                                                "sadness", "surprise", "neutral"};
  return kNames[static_cast<std::size_t>(e)];
}

std::string_view to_string(AffectState a) noexcept {
  static constexpr std::string_view kNames[] = {"positive", "neutral", "surprise", "negative"};
  return kNames[static_cast<std::size_t>(a)];
}

Emotion7 Emotion7::one_hot(Emotion e) {
  Emotion7 out;
  out.p[static_cast<std::size_t>(e)] = 1.0;
  return out;
}

AffectState group_of(Emotion e) noexcept {
  switch (e) {
    case Emotion::Happiness: return AffectState::Positive;
    case Emotion::Neutral: return AffectState::Neutral;
    case Emotion::Surprise: return AffectState::Surprise;
    case Emotion::Anger:
    case Emotion::Disgust:
    case Emotion::Fear:
    case Emotion::Sadness:
      return AffectState::Negative;
  }
  return AffectState::Negative;
}

AffectState Affect4::dominant() const {
  static constexpr AffectState kOrder[] = {AffectState::Negative, AffectState::Neutral,
                                           AffectState::Positive, AffectState::Surprise};
  AffectState best = kOrder[0];
  for (AffectState s : kOrder)
    if ((*this)[s] > (*this)[best]) best = s;
  return best;
}

double Affect4::confidence() const { return (*this)[dominant()]; }

Affect4 Affect4::one_hot(AffectState a) {
  Affect4 out;
  out.p[static_cast<std::size_t>(a)] = 1.0;
  return out;
}

void validate(const Emotion7& e) {
  double sum = 0.0;
  for (std::size_t i = 0; i < e.p.size(); ++i) {
    const double v = e.p[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw Error(Errc::InvalidDistribution, std::string(to_string(static_cast<Emotion>(i))),
                  "probability outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMassTolerance)
    throw Error(Errc::InvalidDistribution, "emotion7", "probabilities sum to " + std::to_string(sum));
}

Affect4 reduce(const Emotion7& e) {
  validate(e);
  Affect4 out;
  for (std::size_t i = 0; i < e.p.size(); ++i)
    out.p[static_cast<std::size_t>(group_of(static_cast<Emotion>(i)))] += e.p[i];
  return out;
}

bool AffectWindow::push(TimeMs t, const Affect4& a) {
  if (!entries_.empty() && t < entries_.back().first) return false;
  entries_.emplace_back(t, a);
  while (entries_.front().first < t - span_ms_) entries_.pop_front();
  return true;
}

Affect4 smooth(const AffectWindow& window) {
  if (window.empty()) throw Error(Errc::EmptyWindow, "affect_window", "no observations");
  Affect4 mean;
  for (const auto& [t, a] : window.entries())
    for (std::size_t i = 0; i < 4; ++i) mean.p[i] += a.p[i];
  double total = 0.0;
  for (double v : mean.p) total += v;
  if (total > 0.0)
    for (double& v : mean.p) v /= total;
  return mean;
}

double flatness(const AffectWindow& window) {
  if (window.empty()) throw Error(Errc::EmptyWindow, "affect_window", "no observations");
  double sum = 0.0;
  for (const auto& [t, a] : window.entries()) sum += a.neutral();
  return sum / static_cast<double>(window.size());
}

}  // namespace blexer::affect
