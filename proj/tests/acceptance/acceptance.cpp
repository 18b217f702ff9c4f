// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "blexer/affect/affect.hpp"
#include "blexer/cam/rules.hpp"
#include "blexer/common/error.hpp"
#include "blexer/fusion/hrv.hpp"
#include "blexer/ingest/rr.hpp"
#include "blexer/ipm/pcg.hpp"
#include "blexer/net/client.hpp"
#include "blexer/net/hub.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/simkit/closed_loop.hpp"
#include "blexer/simkit/replay.hpp"
#include "blexer/simkit/scenario.hpp"
#include "blexer/wire/codec.hpp"
#include "blexer/wire/handshake.hpp"
#include "checks.hpp"
#include "gen.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"

using namespace blexer;

namespace {

// Pinned tolerances and budgets.
constexpr double kRrTolMs = 1.0 / (1 << 20);
constexpr double kMassTol = 1e-12;
constexpr double kHrvRelTol = 1e-9;
constexpr double kBandLow = 0.4, kBandHigh = 0.8;
constexpr double kInBandFraction = 0.70;
constexpr int kSeeds = 20;
constexpr int kSeedsInBand = 16;
constexpr int kBurnInTicks = 100;
constexpr int kRegulationTicks = 1000;
constexpr TimeMs kSafetyTicks = 10'000;
constexpr double kLatencyP95Ms = 200.0;
constexpr double kRrBudgetS = 1.0, kHrvBudgetS = 5.0, kSafetyBudgetS = 60.0, kRegulationBudgetS = 120.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& fn, double budget_s = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(budget_s) + " s budget";
  }
  if (!o.pass) ++failures;
  std::printf("%s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool has_rule(const cam::Directive& d, const char* rule) {
  return std::find(d.rationale.begin(), d.rationale.end(), rule) != d.rationale.end();
}

// Difficulty changes made by R3/R4 must come at least one dwell after the
// previous change of any origin.
struct DwellAudit {
  std::size_t logs = 0;
  std::size_t rule_changes = 0;
  std::size_t violations = 0;
  std::string first;

  void check(const std::vector<cam::Directive>& ds, TimeMs dwell) {
    ++logs;
    std::optional<TimeMs> last_change;
    std::optional<int> level;
    for (const auto& d : ds) {
      const bool changed = level && d.difficulty_target != *level;
      if (changed && !has_rule(d, cam::kRuleSafety) &&
          (has_rule(d, cam::kRuleUp) || has_rule(d, cam::kRuleDown))) {
        ++rule_changes;
        if (last_change && d.issued_at - *last_change < dwell) {
          if (!violations)
            first = "change at " + std::to_string(d.issued_at) + " ms only " +
                    std::to_string(d.issued_at - *last_change) + " ms after the previous one";
          ++violations;
        }
      }
      if (changed) last_change = d.issued_at;
      level = d.difficulty_target;
    }
  }
  void check(const std::vector<simkit::EmittedDirective>& ds, TimeMs dwell) {
    std::vector<cam::Directive> plain;
    for (const auto& e : ds) plain.push_back(e.directive);
    check(plain, dwell);
  }
};

DwellAudit dwell_audit;

Outcome rr_conversion() {
  if (ingest::rr_to_ms(1024) != 1000.0) return {false, "rr_to_ms(1024) != 1000.0"};
  std::mt19937_64 g(1024);
  std::uniform_int_distribution<std::uint32_t> raw(1, 1u << 20);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto r = raw(g);
    const long double exact = static_cast<long double>(r) * 1000.0L / 1024.0L;
    worst = std::max(worst, static_cast<double>(std::fabs(ingest::rr_to_ms(r) - exact)));
  }
  return {worst <= kRrTolMs, "max error " + sci(worst) + " ms over 1000 values"};
}

Outcome emotion_reduction() {
  for (std::size_t i = 0; i < 7; ++i) {
    const auto e = static_cast<affect::Emotion>(i);
    const auto a = affect::reduce(affect::Emotion7::one_hot(e));
    const int want = oracle::group_index(oracle::emotion_names()[i]);
    if (a.p[static_cast<std::size_t>(want)] != 1.0 || static_cast<int>(a.dominant()) != want)
      return {false, std::string("one-hot ") + oracle::emotion_names()[i] + " maps to the wrong class"};
  }
  std::mt19937_64 g(7);
  std::exponential_distribution<double> ex(1.0);
  double worst = 0;
  for (int i = 0; i < 10'000; ++i) {
    affect::Emotion7 x;
    double sum = 0;
    for (auto& v : x.p) sum += (v = ex(g));
    for (auto& v : x.p) v /= sum;
    double in = 0, out = 0;
    for (double v : x.p) in += v;
    for (double v : affect::reduce(x).p) out += v;
    worst = std::max(worst, std::fabs(in - out));
  }
  return {worst <= kMassTol, "7 one-hots ok; max mass drift " + sci(worst) + " over 10000 points"};
}

Outcome hrv_oracle() {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> len(2, 600);
  std::uniform_real_distribution<double> v(300, 2000);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> rr(static_cast<std::size_t>(len(g)));
    for (auto& x : rr) x = v(g);
    worst = std::max(worst, oracle::rel_err(fusion::rmssd(rr), oracle::rmssd(rr)));
    worst = std::max(worst, oracle::rel_err(fusion::sdnn(rr), oracle::sdnn(rr)));
  }
  return {worst <= kHrvRelTol, "max relative error " + sci(worst) + " over 1000 sequences"};
}

Outcome safety_dominance() {
  std::size_t fatigued = 0, raised = 0, total_ticks = 0;
  std::string first;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    std::mt19937_64 g(static_cast<std::uint64_t>(seed) * 7919);
    simkit::SimOptions o;
    o.seed = static_cast<std::uint64_t>(seed);
    o.player.skill = std::uniform_real_distribution<double>(2.0, 8.0)(g);
    o.player.fatigue_gain = std::uniform_real_distribution<double>(0.001, 0.004)(g);
    o.duration_ms = kSafetyTicks * runtime::kDecisionPeriodMs;
    o.random_overrides_per_min = 2.0;
    const auto r = simkit::run_simulation(o);
    total_ticks += r.ticks.size();
    dwell_audit.check(r.directives, o.rules.dwell_ms);
    for (const auto& e : r.directives) {
      if (!e.had_state || e.fatigue < o.plan.fatigue_threshold || !e.previous_difficulty) continue;
      ++fatigued;
      if (e.directive.difficulty_target > *e.previous_difficulty) {
        if (!raised)
          first = "seed " + std::to_string(seed) + " raised difficulty at " +
                  std::to_string(e.directive.issued_at) + " ms";
        ++raised;
      }
    }
  }
  if (fatigued == 0) return {false, "no directive was issued under fatigue; the check is vacuous"};
  std::string detail = std::to_string(total_ticks) + " ticks, " + std::to_string(fatigued) +
                       " directives under fatigue, " + std::to_string(raised) + " raised difficulty";
  if (raised) detail += "; " + first;
  return {raised == 0, detail};
}

Outcome closed_loop_regulation() {
  int good = 0;
  std::string fractions;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    simkit::SimOptions o;
    o.seed = static_cast<std::uint64_t>(seed);
    o.player.skill = 5.0;
    o.duration_ms = static_cast<TimeMs>(kBurnInTicks + kRegulationTicks) * runtime::kDecisionPeriodMs;
    const auto r = simkit::run_simulation(o);
    dwell_audit.check(r.directives, o.rules.dwell_ms);
    std::size_t in = 0, n = 0;
    for (std::size_t i = kBurnInTicks; i < r.ticks.size(); ++i) {
      ++n;
      const auto& s = r.ticks[i].rolling_success;
      if (s && *s >= kBandLow && *s <= kBandHigh) ++in;
    }
    const double frac = n ? static_cast<double>(in) / static_cast<double>(n) : 0.0;
    if (n >= static_cast<std::size_t>(kRegulationTicks) && frac >= kInBandFraction) ++good;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s%.2f", seed > 1 ? " " : "", frac);
    fractions += buf;
  }
  return {good >= kSeedsInBand,
          std::to_string(good) + "/" + std::to_string(kSeeds) + " seeds in band >= 70% [" + fractions + "]"};
}

Outcome hysteresis() {
  if (dwell_audit.rule_changes == 0) return {false, "no rule-driven difficulty change observed"};
  std::string detail = std::to_string(dwell_audit.logs) + " logs, " + std::to_string(dwell_audit.rule_changes) +
                       " R3/R4 changes, " + std::to_string(dwell_audit.violations) + " within the dwell";
  if (dwell_audit.violations) detail += "; " + dwell_audit.first;
  return {dwell_audit.violations == 0, detail};
}

Outcome pcg_constraints() {
  gen::Eng g(2024);
  const auto catalog = ipm::default_catalog();
  std::size_t feasible = 0, infeasible = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto plan = gen::quota_plan(g);
    const auto seed = g();
    if (!checks::pcg_feasible(plan, catalog)) {
      ++infeasible;
      try {
        ipm::pcg_sequence(plan, catalog, seed);
        return {false, "case " + std::to_string(i) + ": infeasible plan was scheduled"};
      } catch (const Error& e) {
        if (e.code() != Errc::InfeasibleQuota) return {false, "case " + std::to_string(i) + ": wrong error"};
      }
      continue;
    }
    ++feasible;
    const auto a = ipm::pcg_sequence(plan, catalog, seed);
    const auto why = checks::pcg_violation(plan, catalog, a);
    if (!why.empty()) return {false, "case " + std::to_string(i) + ": " + why};
    if (ipm::sequence_hash(ipm::pcg_sequence(plan, catalog, seed)) != ipm::sequence_hash(a))
      return {false, "case " + std::to_string(i) + ": not deterministic"};
  }
  return {feasible > 0, std::to_string(feasible) + " feasible plans valid and repeatable, " +
                            std::to_string(infeasible) + " infeasible rejected"};
}

Outcome protocol_robustness() {
  gen::Eng g(31337);
  std::size_t rejected = 0;
  for (int i = 0; i < 10'000; ++i) {
    std::string bytes;
    if (i % 4 == 0) {
      bytes.resize(gen::below(g, 200));
      for (auto& c : bytes) c = static_cast<char>(gen::below(g, 256));
    } else {
      bytes = wire::encode(gen::envelope(g));
      const auto edits = 1 + gen::below(g, 4);
      for (std::size_t k = 0; k < edits && !bytes.empty(); ++k) {
        const auto pos = gen::below(g, bytes.size());
        switch (gen::below(g, 3)) {
          case 0: bytes[pos] = static_cast<char>(gen::below(g, 256)); break;
          case 1: bytes.erase(pos, 1 + gen::below(g, 8)); break;
          default: bytes.insert(pos, 1, "{}[]\",:0"[gen::below(g, 8)]); break;
        }
      }
    }
    try {
      wire::decode(bytes);
    } catch (const Error&) {
      ++rejected;
    } catch (const std::exception& e) {
      return {false, std::string("fuzz case raised a foreign exception: ") + e.what()};
    }
  }
  for (int i = 0; i < 10'000; ++i) {
    const auto m = gen::envelope(g);
    if (wire::decode(wire::encode(m)) != m) return {false, "round trip " + std::to_string(i) + " differs"};
  }
  for (int t = static_cast<int>(wire::MsgType::Ack); t <= static_cast<int>(wire::MsgType::Bye); ++t) {
    const wire::Envelope e{1, 0, gen::payload(g, static_cast<wire::MsgType>(t))};
    try {
      wire::handshake_step({}, e, 0);
      return {false, std::string(wire::to_string(e.type())) + " accepted before HELLO"};
    } catch (const Error& err) {
      if (err.code() != Errc::ProtocolViolation) return {false, "wrong error before HELLO"};
    }
  }
  return {true, "10000 fuzz cases (" + std::to_string(rejected) +
                    " rejected cleanly), 10000 round trips, every pre-HELLO message refused"};
}

Outcome end_to_end_latency() {
  TempDir tmp("blexer-acc");
  runtime::HubConfig c;
  c.bind_address = "127.0.0.1";
  c.port_ecg = c.port_ppg = c.port_game = c.port_skel = c.http_port = 0;
  c.sessions_dir = tmp.path;
  net::Hub hub(c);
  hub.start();
  std::atomic<bool> stop{false};
  net::FeedTargets to;
  to.ecg = hub.port_ecg();
  to.ppg = hub.port_ppg();
  to.skel = hub.port_skel();
  std::thread feeder(
      [&] { net::feed_stream(simkit::generate_stream(simkit::bundled_scenario("steady-exercise", 1)), to, 1.0, &stop); });
  std::this_thread::sleep_for(std::chrono::seconds(15));
  stop = true;
  feeder.join();
  const auto lat = hub.latency();
  hub.stop();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu samples, p50 %.1f ms, p95 %.1f ms, max %.1f ms", lat.count, lat.p50_ms,
                lat.p95_ms, lat.max_ms);
  return {lat.count >= 100 && lat.p95_ms <= kLatencyP95Ms, buf};
}

Outcome replay_determinism() {
  TempDir tmp("blexer-acc");
  simkit::SimOptions o;
  o.seed = 77;
  o.scenario = simkit::bundled_scenario("fatigue-ramp", 77);
  o.duration_ms = static_cast<TimeMs>(o.scenario->duration_s() * 1000);
  o.random_overrides_per_min = 1.0;
  const auto sim = simkit::record_simulation(o, tmp.path);
  dwell_audit.check(sim.directives, o.rules.dwell_ms);
  simkit::ReplayOptions ro;
  ro.speed = 10.0;
  const auto rep = simkit::replay_session(tmp.path, ro);
  const auto logged = runtime::directive_sequence_hash(simkit::read_directives(tmp.path));
  dwell_audit.check(rep.directives, o.rules.dwell_ms);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu directives, %zu inputs, hash recorded %016llx replayed %016llx",
                rep.directives.size(), rep.inputs, static_cast<unsigned long long>(logged),
                static_cast<unsigned long long>(rep.directive_hash));
  return {rep.directive_hash == logged && logged == sim.directive_hash && rep.directives.size() > 1, buf};
}

}  // namespace

int main() {
  report("rr unit conversion", rr_conversion, kRrBudgetS);
  report("emotion reduction table", emotion_reduction);
  report("hrv oracle equivalence", hrv_oracle, kHrvBudgetS);
  report("safety dominance", safety_dominance, kSafetyBudgetS);
  report("closed-loop regulation", closed_loop_regulation, kRegulationBudgetS);
  report("pcg constraints", pcg_constraints);
  report("protocol robustness", protocol_robustness);
  report("end-to-end latency", end_to_end_latency);
  report("replay determinism", replay_determinism);
  report("hysteresis", hysteresis);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
