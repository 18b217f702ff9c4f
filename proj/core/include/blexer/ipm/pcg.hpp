#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blexer/cam/types.hpp"
#include "blexer/ipm/catalog.hpp"

namespace blexer::ipm {

struct SequenceSlot {
  std::string exercise_id;
  cam::TaskCategory category = cam::TaskCategory::Coordination;
  int offset = 0;  // relative to the directive's difficulty target
  bool operator==(const SequenceSlot&) const = default;
};

struct SequencePlan {
  std::vector<SequenceSlot> slots;
  std::uint64_t seed = 0;
  bool operator==(const SequencePlan&) const = default;
};

// Seeded ordering of plan.quotas over the catalog. Each category's quota is
// spread round-robin over its eligible exercises (shuffled), then the
// multiset is ordered so no exercise follows itself. Offsets ramp -1, 0..0,
// +1. Throws Error{InfeasibleQuota} when a category with a quota has no
// eligible exercise or no valid ordering exists.
SequencePlan pcg_sequence(const cam::TherapyPlan& plan, const Catalog& catalog, std::uint64_t seed);

// FNV-1a over the slot list, for determinism checks.
std::uint64_t sequence_hash(const SequencePlan& plan);

nlohmann::json to_json(const SequencePlan& plan);

}  // namespace blexer::ipm
