#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdeg/operator_schedule.hpp"

namespace sdeg {

// The builtin scenario library. Entry stages assume the default s-first
// ordering, under which the first R-node is <infty> and appoints its first
// witness at stage 3.
struct ScenarioInfo {
    std::string name;
    std::string description;
};

std::vector<ScenarioInfo> scenario_list();
std::optional<std::vector<OperatorSchedule>> builtin_scenario(const std::string& name);

}  // namespace sdeg
