#include "blexer/simkit/player_driver.hpp"

namespace blexer::simkit {

PlayerDriver::PlayerDriver(ipm::Catalog catalog, ipm::ControllerOptions options,
                           PlayerModel player, std::uint64_t seed)
    : game_(std::move(catalog), std::move(options)),
      player_(player),
      rng_(seed * 0x2545f4914f6cdd1dULL + 7) {}

std::vector<ipm::PerformanceReport> PlayerDriver::step(TimeMs now, TimeMs dt) {
  game_.tick(now);
  if (game_.state().phase == ipm::Phase::Active) {
    if (!rep_armed_) {
      rep_armed_ = true;
      rep_due_ = now + game_.rep_period_ms();
    }
    if (now >= rep_due_) {
      const AttemptResult a = attempt(player_, game_.state().difficulty, rng_);
      player_ = a.model;
      game_.on_rep(a.success, now);
      rep_due_ = now + game_.rep_period_ms();
    }
  } else {
    rep_armed_ = false;
    if (game_.state().phase == ipm::Phase::Rest)
      player_ = rest(player_, static_cast<double>(dt) / 1000.0);
  }
  return game_.take_reports();
}

}  // namespace blexer::simkit
