#include "blexer/simkit/player.hpp"

#include <algorithm>
#include <cmath>

namespace blexer::simkit {

double success_probability(const PlayerModel& m, int difficulty) {
  const double x = m.k * (static_cast<double>(difficulty) - m.skill + m.fatigue_penalty * m.fatigue_acc);
  return 1.0 / (1.0 + std::exp(x));
}

AttemptResult attempt(const PlayerModel& m, int difficulty, Rng& rng) {
  AttemptResult r;
  r.success = rng.uniform01() < success_probability(m, difficulty);
  r.model = m;
  r.model.fatigue_acc =
      std::clamp(m.fatigue_acc + m.fatigue_gain * static_cast<double>(difficulty), 0.0, 1.0);
  return r;
}

PlayerModel rest(const PlayerModel& m, double seconds) {
  PlayerModel out = m;
  out.fatigue_acc = std::clamp(m.fatigue_acc - m.recovery_per_s * seconds, 0.0, 1.0);
  return out;
}

}  // namespace blexer::simkit
