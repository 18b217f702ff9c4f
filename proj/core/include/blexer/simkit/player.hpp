#pragma once

#include "blexer/common/rng.hpp"

namespace blexer::simkit {

// Synthetic patient: logistic success in (difficulty - skill), penalized by
// accumulated fatigue.
struct PlayerModel {
  double skill = 5.0;
  double fatigue_acc = 0.0;  // [0,1]
  double k = 1.0;
  double fatigue_gain = 0.002;    // per rep, times difficulty
  double recovery_per_s = 0.005;  // while resting
  double fatigue_penalty = 5.0;
};

double success_probability(const PlayerModel& m, int difficulty);

struct AttemptResult {
  bool success = false;
  PlayerModel model;
};

AttemptResult attempt(const PlayerModel& m, int difficulty, Rng& rng);
PlayerModel rest(const PlayerModel& m, double seconds);

}  // namespace blexer::simkit
