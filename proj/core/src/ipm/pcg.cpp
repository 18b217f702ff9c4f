#include "blexer/ipm/pcg.hpp"

#include <algorithm>

#include "blexer/common/error.hpp"
#include "blexer/common/hash.hpp"
#include "blexer/common/rng.hpp"

namespace blexer::ipm {

namespace {

struct Item {
  const ExerciseSpec* spec;
  int count;
};

// A sequence of the remaining items exists, with `prev` not allowed first,
// iff no item needs more than half the slots (prev: rounded down).
bool arrangeable(const std::vector<Item>& items, int remaining, std::size_t prev) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    const int limit = i == prev ? remaining / 2 : (remaining + 1) / 2;
    if (items[i].count > limit) return false;
  }
  return true;
}

}  // namespace

SequencePlan pcg_sequence(const cam::TherapyPlan& plan, const Catalog& catalog, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Item> items;
  int total = 0;
  for (auto category : cam::kAllCategories) {
    auto q = plan.quotas.find(category);
    const int quota = q == plan.quotas.end() ? 0 : q->second;
    if (quota <= 0) continue;
    auto pool = catalog.in_category(category, plan.excluded_exercises);
    if (pool.empty())
      throw Error(Errc::InfeasibleQuota, std::string(to_string(category)),
                  "quota " + std::to_string(quota) + " but no eligible exercise");
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.uniform_below(i)]);
    const std::size_t first = items.size();
    for (int k = 0; k < quota; ++k) {
      const std::size_t slot = static_cast<std::size_t>(k) % pool.size();
      if (first + slot == items.size()) items.push_back({pool[slot], 0});
      ++items[first + slot].count;
    }
    total += quota;
  }

  const std::size_t none = items.size();
  if (!arrangeable(items, total, none))
    throw Error(Errc::InfeasibleQuota, "quotas", "no ordering without an immediate repeat");

  SequencePlan out;
  out.seed = seed;
  std::size_t prev = none;
  std::vector<std::size_t> feasible;
  for (int remaining = total; remaining > 0; --remaining) {
    feasible.clear();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i == prev || items[i].count == 0) continue;
      --items[i].count;
      if (arrangeable(items, remaining - 1, i)) feasible.push_back(i);
      ++items[i].count;
    }
    // Cannot be empty: the largest remaining item is always feasible.
    const std::size_t pick = feasible[rng.uniform_below(feasible.size())];
    --items[pick].count;
    prev = pick;
    out.slots.push_back({items[pick].spec->id, items[pick].spec->category, 0});
  }

  if (out.slots.size() > 1) {
    out.slots.front().offset = -1;
    out.slots.back().offset = +1;
  }
  return out;
}

std::uint64_t sequence_hash(const SequencePlan& plan) {
  Fnv1a h;
  for (const auto& s : plan.slots) {
    h.update(s.exercise_id);
    h.update(":");
    h.update(std::to_string(s.offset));
    h.update(";");
  }
  return h.digest();
}

nlohmann::json to_json(const SequencePlan& plan) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : plan.slots)
    slots.push_back({{"exercise_id", s.exercise_id},
                     {"category", to_string(s.category)},
                     {"offset", s.offset}});
  return {{"seed", plan.seed}, {"slots", slots}};
}

}  // namespace blexer::ipm
