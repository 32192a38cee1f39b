#pragma once

// JSON run configuration. Field names mirror ScenarioConfig. Accepted shapes:
//   [ {scenario}, ... ]
//   { "defaults": {...}, "default_grid": true | {...}, "scenarios": [...] }
//   { single scenario }

#include <optional>
#include <string>
#include <vector>

#include "causalmon/harness.hpp"

namespace causalmon {

struct RunConfig {
  std::vector<ScenarioConfig> scenarios;
  std::optional<std::size_t> workers;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

std::string scenario_to_json(const ScenarioConfig& config, int indent = 2);
std::string scenarios_to_json(const std::vector<ScenarioConfig>& configs, int indent = 2);

}  // namespace causalmon
