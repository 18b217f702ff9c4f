#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blexer/cam/directive.hpp"

namespace blexer::ipm {

// How directive-level values become in-game parameters for one exercise.
struct ParamMap {
  double speed_base = 0.6;  // movement speed multiplier at difficulty 1
  double speed_per_level = 0.1;
  int targets_base = 2;
  int targets_per_level = 1;
  std::map<cam::Pacing, int> inter_rep_gap_ms{
      {cam::Pacing::Slow, 2000}, {cam::Pacing::Normal, 1000}, {cam::Pacing::Fast, 500}};
  bool operator==(const ParamMap&) const = default;
};

struct ExerciseSpec {
  std::string id;
  std::string name;
  cam::TaskCategory category = cam::TaskCategory::Coordination;
  int base_reps = 10;
  ParamMap params;
  bool operator==(const ExerciseSpec&) const = default;
};

struct GameParams {
  double speed = 1.0;
  int targets = 1;
  int inter_rep_gap_ms = 1000;
  bool operator==(const GameParams&) const = default;
};

GameParams bind_params(const ExerciseSpec& spec, int difficulty, cam::Pacing pacing);

class Catalog {
 public:
  Catalog() = default;
  // Throws Error{InvalidConfig} on duplicate or empty ids and on
  // non-positive base_reps.
  explicit Catalog(std::vector<ExerciseSpec> exercises);

  const std::vector<ExerciseSpec>& exercises() const { return exercises_; }
  const ExerciseSpec* find(const std::string& id) const;
  // Exercises of a category in catalog order, minus the excluded ids.
  std::vector<const ExerciseSpec*> in_category(cam::TaskCategory c,
                                               const std::set<std::string>& excluded = {}) const;
  std::size_t size() const { return exercises_.size(); }

 private:
  std::vector<ExerciseSpec> exercises_;
};

// The prototype exercise set plus a memory exercise.
Catalog default_catalog();

nlohmann::json to_json(const Catalog& c);
Catalog catalog_from_json(const nlohmann::json& j);
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace blexer::ipm
