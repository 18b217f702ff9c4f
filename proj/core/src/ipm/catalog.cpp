#include "blexer/ipm/catalog.hpp"

#include <algorithm>
#include <fstream>

#include "blexer/common/error.hpp"

namespace blexer::ipm {

using nlohmann::json;

GameParams bind_params(const ExerciseSpec& spec, int difficulty, cam::Pacing pacing) {
  const int d = std::clamp(difficulty, cam::kMinDifficulty, cam::kMaxDifficulty) - 1;
  GameParams g;
  g.speed = spec.params.speed_base + spec.params.speed_per_level * d;
  g.targets = spec.params.targets_base + spec.params.targets_per_level * d;
  auto it = spec.params.inter_rep_gap_ms.find(pacing);
  g.inter_rep_gap_ms = it == spec.params.inter_rep_gap_ms.end() ? 1000 : it->second;
  return g;
}

Catalog::Catalog(std::vector<ExerciseSpec> exercises) : exercises_(std::move(exercises)) {
  std::set<std::string> seen;
  for (const auto& e : exercises_) {
    if (e.id.empty()) throw Error(Errc::InvalidConfig, "catalog.id", "empty exercise id");
    if (!seen.insert(e.id).second)
      throw Error(Errc::InvalidConfig, "catalog.id", "duplicate exercise id '" + e.id + "'");
    if (e.base_reps <= 0)
      throw Error(Errc::InvalidConfig, "catalog." + e.id + ".base_reps", "must be positive");
  }
}

const ExerciseSpec* Catalog::find(const std::string& id) const {
  for (const auto& e : exercises_)
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<const ExerciseSpec*> Catalog::in_category(cam::TaskCategory c,
                                                      const std::set<std::string>& excluded) const {
  std::vector<const ExerciseSpec*> out;
  for (const auto& e : exercises_)
    if (e.category == c && !excluded.count(e.id)) out.push_back(&e);
  return out;
}

Catalog default_catalog() {
  using cam::TaskCategory;
  return Catalog({
      {"alternating_arm_lifts", "Alternating arm lifts", TaskCategory::Coordination, 10, {}},
      {"arm_raise_hammering", "Arm raise and hammering motion", TaskCategory::Coordination, 10, {}},
      {"forward_backward_arm", "Forward-backward arm movements", TaskCategory::ReactionSpeed, 12, {}},
      {"left_right_body_shifts", "Left-right body shifts", TaskCategory::ReactionSpeed, 12, {}},
      {"sequence_recall", "Sequence recall", TaskCategory::Memory, 8, {}},
  });
}

json to_json(const Catalog& c) {
  json list = json::array();
  for (const auto& e : c.exercises()) {
    json gaps = json::object();
    for (const auto& [p, ms] : e.params.inter_rep_gap_ms) gaps[std::string(to_string(p))] = ms;
    list.push_back({{"id", e.id},
                    {"name", e.name},
                    {"category", to_string(e.category)},
                    {"base_reps", e.base_reps},
                    {"param_map",
                     {{"speed_base", e.params.speed_base},
                      {"speed_per_level", e.params.speed_per_level},
                      {"targets_base", e.params.targets_base},
                      {"targets_per_level", e.params.targets_per_level},
                      {"inter_rep_gap_ms", gaps}}}});
  }
  return {{"exercises", list}};
}

Catalog catalog_from_json(const json& j) {
  auto bad = [](const std::string& field, const std::string& why) -> Error {
    return Error(Errc::InvalidConfig, field, why);
  };
  const json* list = &j;
  if (j.is_object()) {
    auto it = j.find("exercises");
    if (it == j.end()) throw bad("exercises", "missing");
    list = &*it;
  }
  if (!list->is_array()) throw bad("exercises", "expected array");
  std::vector<ExerciseSpec> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& e = (*list)[i];
    const std::string at = "exercises[" + std::to_string(i) + "]";
    try {
      ExerciseSpec s;
      s.id = e.at("id").get<std::string>();
      s.name = e.value("name", s.id);
      const auto cat = cam::parse_category(e.at("category").get<std::string>());
      if (!cat) throw bad(at + ".category", "unknown task category");
      s.category = *cat;
      s.base_reps = e.value("base_reps", s.base_reps);
      if (auto pm = e.find("param_map"); pm != e.end()) {
        s.params.speed_base = pm->value("speed_base", s.params.speed_base);
        s.params.speed_per_level = pm->value("speed_per_level", s.params.speed_per_level);
        s.params.targets_base = pm->value("targets_base", s.params.targets_base);
        s.params.targets_per_level = pm->value("targets_per_level", s.params.targets_per_level);
        if (auto gaps = pm->find("inter_rep_gap_ms"); gaps != pm->end()) {
          for (auto g = gaps->begin(); g != gaps->end(); ++g) {
            const auto p = cam::parse_pacing(g.key());
            if (!p) throw bad(at + ".param_map.inter_rep_gap_ms", "unknown pacing '" + g.key() + "'");
            s.params.inter_rep_gap_ms[*p] = g.value().get<int>();
          }
        }
      }
      out.push_back(std::move(s));
    } catch (const json::exception& ex) {
      throw bad(at, ex.what());
    }
  }
  return Catalog(std::move(out));
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, path.string(), "cannot open");
  try {
    return catalog_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(Errc::InvalidConfig, path.string(), e.what());
  }
}

}  // namespace blexer::ipm
