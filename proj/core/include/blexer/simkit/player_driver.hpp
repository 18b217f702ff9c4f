#pragma once

#include <cstdint>
#include <vector>

#include "blexer/common/rng.hpp"
#include "blexer/ipm/play_controller.hpp"
#include "blexer/simkit/player.hpp"

namespace blexer::simkit {

// The reference game: a play controller with a synthetic player making the
// attempts. Advanced in fixed steps by either the simulator or a live client.
class PlayerDriver {
 public:
  PlayerDriver(ipm::Catalog catalog, ipm::ControllerOptions options, PlayerModel player,
               std::uint64_t seed);

  void on_directive(const cam::Directive& d, TimeMs now) { game_.on_directive(d, now); }
  // One step of `dt` ms ending at `now`; returns the reports it produced.
  std::vector<ipm::PerformanceReport> step(TimeMs now, TimeMs dt);
  void finish(TimeMs now) { game_.finish(now); }
  std::vector<ipm::PerformanceReport> take_reports() { return game_.take_reports(); }

  const ipm::PlayController& game() const { return game_; }
  const PlayerModel& player() const { return player_; }

 private:
  ipm::PlayController game_;
  PlayerModel player_;
  Rng rng_;
  bool rep_armed_ = false;
  TimeMs rep_due_ = 0;
};

}  // namespace blexer::simkit
