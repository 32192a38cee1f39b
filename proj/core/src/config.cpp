#include "causalmon/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "causalmon/errors.hpp"

namespace causalmon {

namespace {

using nlohmann::json;

const char* shape_name(ShiftShape s) { return s == ShiftShape::Sudden ? "sudden" : "gradual"; }

ShiftShape shape_from_string(const std::string& s) {
  if (s == "sudden") return ShiftShape::Sudden;
  if (s == "gradual") return ShiftShape::Gradual;
  throw InputError("unknown shift shape: " + s);
}

const char* baseline_name(OutcomeBaseline b) { return b == OutcomeBaseline::Oracle ? "oracle" : "worst_case_null"; }

OutcomeBaseline baseline_from_string(const std::string& s) {
  if (s == "oracle") return OutcomeBaseline::Oracle;
  if (s == "worst_case_null") return OutcomeBaseline::WorstCaseNull;
  throw InputError("unknown outcome baseline: " + s);
}

const char* null_name(WorstCaseNull v) { return v == WorstCaseNull::SignAdjusted ? "sign_adjusted" : "literal"; }

WorstCaseNull null_from_string(const std::string& s) {
  if (s == "sign_adjusted") return WorstCaseNull::SignAdjusted;
  if (s == "literal") return WorstCaseNull::Literal;
  throw InputError("unknown bootstrap null: " + s);
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

ShiftScenario shift_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config field 'shift' must be an object or null");
  ShiftScenario s;
  for (const auto& [key, value] : j.items()) {
    if (key == "arm") s.shifted_arm = get_as<int>(value, "shift.arm");
    else if (key == "subgroup") s.shifted_subgroup = subgroup_by_name(get_as<std::string>(value, "shift.subgroup"));
    else if (key == "magnitude") s.magnitude = get_as<double>(value, "shift.magnitude");
    else if (key == "shape") s.shape = shape_from_string(get_as<std::string>(value, "shift.shape"));
    else if (key == "change_time") s.change_time = get_as<std::int64_t>(value, "shift.change_time");
    else if (key == "ramp_length") s.ramp_length = get_as<double>(value, "shift.ramp_length");
    else throw InputError("unknown shift field: " + key);
  }
  s.validate();
  return s;
}

void apply_fields(ScenarioConfig& c, const json& j) {
  if (!j.is_object()) throw InputError("scenario must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "cell") c.cell = get_as<std::string>(v, "cell");
    else if (key == "setting") c.setting = setting_from_string(get_as<std::string>(v, "setting"));
    else if (key == "shift") c.shift = v.is_null() ? std::nullopt : std::optional<ShiftScenario>(shift_from_json(v));
    else if (key == "baseline") c.baseline = baseline_from_string(get_as<std::string>(v, "baseline"));
    else if (key == "horizon") c.horizon = get_as<std::int64_t>(v, "horizon");
    else if (key == "batch_size") c.batch_size = get_as<std::size_t>(v, "batch_size");
    else if (key == "monitors") c.monitors = get_as<std::vector<std::string>>(v, "monitors");
    else if (key == "replicates") c.replicates = get_as<std::size_t>(v, "replicates");
    else if (key == "master_seed") c.master_seed = get_as<std::uint64_t>(v, "master_seed");
    else if (key == "delta") c.delta = get_as<double>(v, "delta");
    else if (key == "alpha") c.alpha = get_as<double>(v, "alpha");
    else if (key == "pre_monitoring_n") c.pre_monitoring_n = get_as<std::size_t>(v, "pre_monitoring_n");
    else if (key == "calibration_n") c.calibration_n = get_as<std::size_t>(v, "calibration_n");
    else if (key == "weight_estimation_n") c.weight_estimation_n = get_as<std::size_t>(v, "weight_estimation_n");
    else if (key == "bootstrap_paths") c.bootstrap_paths = get_as<std::size_t>(v, "bootstrap_paths");
    else if (key == "observational_propensity")
      c.observational_propensity = propensity_source_from_string(get_as<std::string>(v, key.c_str()));
    else if (key == "bootstrap_null") c.bootstrap_null = null_from_string(get_as<std::string>(v, "bootstrap_null"));
    else if (key == "model") c.model = model_choice_from_string(get_as<std::string>(v, "model"));
    else if (key == "model_training_n") c.model_training_n = get_as<std::size_t>(v, "model_training_n");
    else if (key == "threshold_drop") c.threshold_drop = get_as<double>(v, "threshold_drop");
    else throw InputError("unknown scenario field: " + key);
  }
}

ScenarioConfig scenario_from_json(const ScenarioConfig& base, const json& j) {
  ScenarioConfig c = base;
  apply_fields(c, j);
  if (c.monitors.empty()) c.monitors = setting_monitors(c.setting);
  return c;
}

GridOptions grid_options_from_json(const json& j) {
  GridOptions o;
  if (j.is_boolean()) return o;
  if (!j.is_object()) throw InputError("'default_grid' must be true or an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "null") o.include_null = get_as<bool>(v, "default_grid.null");
    else if (key == "sudden") o.include_sudden = get_as<bool>(v, "default_grid.sudden");
    else if (key == "gradual") o.include_gradual = get_as<bool>(v, "default_grid.gradual");
    else if (key == "null_replicates") o.null_replicates = get_as<std::size_t>(v, "default_grid.null_replicates");
    else throw InputError("unknown default_grid field: " + key);
  }
  return o;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["cell"] = c.cell;
  j["setting"] = to_string(c.setting);
  if (c.shift) {
    j["shift"] = {{"arm", c.shift->shifted_arm},
                  {"subgroup", c.shift->shifted_subgroup.name},
                  {"magnitude", c.shift->magnitude},
                  {"shape", shape_name(c.shift->shape)},
                  {"change_time", c.shift->change_time},
                  {"ramp_length", c.shift->ramp_length}};
  } else {
    j["shift"] = nullptr;
  }
  j["baseline"] = baseline_name(c.baseline);
  j["horizon"] = c.horizon;
  j["batch_size"] = c.batch_size;
  j["monitors"] = c.monitors;
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["delta"] = c.delta;
  j["alpha"] = c.alpha;
  j["pre_monitoring_n"] = c.pre_monitoring_n;
  j["calibration_n"] = c.calibration_n;
  j["weight_estimation_n"] = c.weight_estimation_n;
  j["bootstrap_paths"] = c.bootstrap_paths;
  j["observational_propensity"] = to_string(c.observational_propensity);
  j["bootstrap_null"] = null_name(c.bootstrap_null);
  j["model"] = to_string(c.model);
  j["model_training_n"] = c.model_training_n;
  j["threshold_drop"] = c.threshold_drop;
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig run;
  if (root.is_array()) {
    for (const auto& item : root) run.scenarios.push_back(scenario_from_json({}, item));
    return run;
  }
  if (!root.is_object()) throw InputError("config must be a JSON object or array");

  const bool composite = root.contains("scenarios") || root.contains("default_grid") || root.contains("defaults");
  if (!composite) {
    run.scenarios.push_back(scenario_from_json({}, root));
    return run;
  }

  ScenarioConfig defaults;
  for (const auto& [key, value] : root.items()) {
    if (key == "defaults") apply_fields(defaults, value);
    else if (key == "workers") run.workers = get_as<std::size_t>(value, "workers");
    else if (key != "scenarios" && key != "default_grid") throw InputError("unknown top-level field: " + key);
  }
  if (root.contains("default_grid")) {
    const json& g = root["default_grid"];
    if (!(g.is_boolean() && !g.get<bool>())) {
      auto grid = default_grid(defaults, grid_options_from_json(g));
      run.scenarios.insert(run.scenarios.end(), grid.begin(), grid.end());
    }
  }
  if (root.contains("scenarios")) {
    if (!root["scenarios"].is_array()) throw InputError("'scenarios' must be an array");
    for (const auto& item : root["scenarios"]) run.scenarios.push_back(scenario_from_json(defaults, item));
  }
  return run;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string scenario_to_json(const ScenarioConfig& config, int indent) { return to_json(config).dump(indent); }

std::string scenarios_to_json(const std::vector<ScenarioConfig>& configs, int indent) {
  json arr = json::array();
  for (const auto& c : configs) arr.push_back(to_json(c));
  return arr.dump(indent);
}

}  // namespace causalmon
