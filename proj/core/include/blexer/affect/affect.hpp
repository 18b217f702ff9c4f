#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <string_view>
#include <utility>

#include "blexer/common/time.hpp"

namespace blexer::affect {

// Facial-emotion classifier output, in this order.
enum class Emotion { Anger, Disgust, Fear, Happiness, Sadness, Surprise, Neutral };

// Core affect states used by CAM.
enum class AffectState { Positive, Neutral, Surprise, Negative };

std::string_view to_string(Emotion e) noexcept;
std::string_view to_string(AffectState a) noexcept;

inline constexpr double kMassTolerance = 1e-6;

struct Emotion7 {
  std::array<double, 7> p{};

  double operator[](Emotion e) const { return p[static_cast<std::size_t>(e)]; }
  static Emotion7 one_hot(Emotion e);
  bool operator==(const Emotion7&) const = default;
};

// Which core state each of the seven labels folds into.
AffectState group_of(Emotion e) noexcept;

struct Affect4 {
  std::array<double, 4> p{};  // positive, neutral, surprise, negative

  double operator[](AffectState a) const { return p[static_cast<std::size_t>(a)]; }
  double positive() const { return p[0]; }
  double neutral() const { return p[1]; }
  double surprise() const { return p[2]; }
  double negative() const { return p[3]; }

  // argmax; exact ties resolve negative > neutral > positive > surprise.
  AffectState dominant() const;
  double confidence() const;

  static Affect4 one_hot(AffectState a);
  bool operator==(const Affect4&) const = default;
};

// Throws Error{InvalidDistribution} unless every component is in [0,1] and
// the components sum to 1 within kMassTolerance.
void validate(const Emotion7& e);

Affect4 reduce(const Emotion7& e);

// Affect observations over the trailing `span_ms` (default 5 s).
class AffectWindow {
 public:
  explicit AffectWindow(TimeMs span_ms = 5000) : span_ms_(span_ms) {}

  // Timestamps must not decrease; an older sample is ignored and false is
  // returned. Entries older than t - span are evicted.
  bool push(TimeMs t, const Affect4& a);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  TimeMs span_ms() const { return span_ms_; }
  TimeMs last_time() const { return entries_.back().first; }
  const std::deque<std::pair<TimeMs, Affect4>>& entries() const { return entries_; }

 private:
  TimeMs span_ms_;
  std::deque<std::pair<TimeMs, Affect4>> entries_;
};

// Element-wise mean over the window, renormalized. Error{EmptyWindow}.
Affect4 smooth(const AffectWindow& window);

// Mean neutral probability over the window. Error{EmptyWindow}.
double flatness(const AffectWindow& window);

}  // namespace blexer::affect
