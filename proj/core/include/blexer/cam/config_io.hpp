#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "blexer/cam/types.hpp"

namespace blexer::cam {

nlohmann::json to_json(const UserState& s);
nlohmann::json to_json(const TherapyPlan& p);
nlohmann::json to_json(const RuleConfig& c);

UserState user_state_from_json(const nlohmann::json& j);

// Missing keys keep their defaults. Throws Error{InvalidConfig} on a wrong
// type, an unsupported version or a failed validate().
TherapyPlan plan_from_json(const nlohmann::json& j);
RuleConfig rule_config_from_json(const nlohmann::json& j);

TherapyPlan load_plan(const std::filesystem::path& path);
RuleConfig load_rule_config(const std::filesystem::path& path);

}  // namespace blexer::cam
