#pragma once

// Experiment orchestration: threshold calibration, per-setting monitoring
// plans, replicate execution against bootstrap control limits, and power
// aggregation over a grid of shift scenarios.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalmon/control_limits.hpp"
#include "causalmon/monitors.hpp"
#include "causalmon/propensity.hpp"
#include "causalmon/risk_model.hpp"
#include "causalmon/simulator.hpp"

namespace causalmon {

enum class Setting { Observational, Interventional };
enum class ModelChoice { Oracle, Fitted };

std::string to_string(Setting setting);
Setting setting_from_string(const std::string& text);
std::string to_string(ModelChoice choice);
ModelChoice model_choice_from_string(const std::string& text);

inline const std::array<std::string, 7> kMonitorIds = {"1N", "1I", "1O", "2I", "2O", "3I", "3O"};

/// The four monitors run in a setting: {1N, 1O, 2O, 3O} or {1N, 1I, 2I, 3I}.
std::vector<std::string> setting_monitors(Setting setting);

struct ScenarioConfig {
  std::string cell = "null";
  Setting setting = Setting::Observational;
  std::optional<ShiftScenario> shift;
  OutcomeBaseline baseline = OutcomeBaseline::Oracle;
  std::int64_t horizon = 4000;
  std::size_t batch_size = 50;
  std::vector<std::string> monitors;
  std::size_t replicates = 200;
  std::uint64_t master_seed = 20240601;
  double delta = 0.02;
  double alpha = 0.10;
  std::size_t pre_monitoring_n = 5000;
  std::size_t calibration_n = 200000;
  std::size_t weight_estimation_n = 20000;
  std::size_t bootstrap_paths = 500;
  /// Propensities used by 1O/2O: the true assignment law, or a fit from the
  /// pre-monitoring phase.
  PropensitySource observational_propensity = PropensitySource::Oracle;
  WorstCaseNull bootstrap_null = WorstCaseNull::SignAdjusted;
  ModelChoice model = ModelChoice::Oracle;
  std::size_t model_training_n = 5000;
  double threshold_drop = 0.02;

  void validate() const;
  StreamSettings stream_settings() const;
};

/// Everything that fixes the monitored streams, thresholds and control limits
/// of a config. Configs with equal keys share plans and bootstrap schedules.
std::string plan_key(const ScenarioConfig& config);

/// Standalone PPV/NPV per (a, v), overall and per subgroup, with thresholds
/// c = value - drop. Index 2a + v: v = 1 holds PPV(a), v = 0 holds NPV(a).
struct ThresholdSet {
  std::array<double, 4> standalone{};
  std::array<double, 4> overall{};
  std::vector<std::array<double, 4>> standalone_by_subgroup;
  std::vector<std::array<double, 4>> by_subgroup;
  std::array<std::size_t, 4> counts{};
  std::vector<Subgroup> subgroups;
  double drop = 0.02;
};

/// Oracle Monte Carlo over the pre-change population using both potential
/// outcomes. Throws DegenerateCellError if an arm never predicts a class.
ThresholdSet calibrate_thresholds(const RiskModel& model, std::span<const Subgroup> subgroups,
                                  std::size_t calibration_n, std::uint64_t seed, double drop = 0.02);

struct MonitoringPlan {
  ScenarioConfig config;  // representative config for the plan key
  RiskModel model = RiskModel::oracle();
  PropensityModel assignment;
  std::optional<PropensityFit> estimated;
  ThresholdSet thresholds;
  std::vector<MonitorSpec> monitors;
  std::vector<std::string> monitor_errors;  // per monitor, empty when usable
};

/// Model, thresholds, propensity fit, subgroup weights and monitor specs for
/// the given monitor ids (the config's own list when empty).
MonitoringPlan prepare_plan(const ScenarioConfig& config, std::span<const std::string> monitor_ids = {});

/// Builds one monitor spec (weights left empty).
MonitorSpec make_monitor(const std::string& id, Setting setting, const ThresholdSet& thresholds, double delta,
                         std::size_t batch_size, double binarize_threshold, PropensitySource observational_propensity,
                         const std::optional<PropensityModel>& estimated);

RiskModel build_model(const ScenarioConfig& config);

struct ReplicateSeeds {
  StreamSeeds stream;
  std::uint64_t bootstrap = 0;
};
ReplicateSeeds replicate_seeds(std::uint64_t master_seed, Setting setting, std::size_t replicate);

/// Shift-independent part of a replicate: assignments, increment tables and
/// control-limit schedules for every monitor of the plan.
struct ReplicateContext {
  std::size_t replicate = 0;
  std::uint64_t outcome_seed = 0;
  std::vector<ObservationRecord> records;  // outcomes not drawn
  std::vector<std::optional<IncrementTable>> tables;
  std::vector<std::optional<ControlLimitSchedule>> schedules;
  std::vector<std::string> errors;
};

ReplicateContext prepare_replicate(const MonitoringPlan& plan, std::size_t replicate);

struct MonitorOutcome {
  std::optional<std::size_t> alarm_batch;
  std::string error;
};

struct ReplicateResult {
  std::vector<std::string> monitor_ids;
  std::vector<MonitorOutcome> outcomes;
  std::vector<std::vector<double>> charts;  // per monitor, empty on error
};

ReplicateResult evaluate_replicate(const MonitoringPlan& plan, const ReplicateContext& context,
                                   const ScenarioConfig& scenario);

/// One monitored stream with every monitor of the config checked against its
/// control limits. Deterministic in (master_seed, replicate_index).
ReplicateResult run_replicate(const ScenarioConfig& scenario, std::size_t replicate_index);
ReplicateResult run_replicate(const MonitoringPlan& plan, const ScenarioConfig& scenario,
                              std::size_t replicate_index);

/// Fraction of replicates alarmed at or before `batch` (1-based).
double estimate_power(std::span<const std::optional<std::size_t>> alarms, std::size_t batch);

struct PowerCurve {
  std::string monitor;
  std::vector<double> power;  // per batch
  std::vector<double> mc_se;
};
PowerCurve power_curve(const std::string& monitor, std::span<const std::optional<std::size_t>> alarms,
                       std::size_t batch_count);

/// Median alarm batch over replicates counting "no alarm" as +infinity;
/// nullopt when the median itself is infinite.
std::optional<double> median_alarm_batch(std::span<const std::optional<std::size_t>> alarms);

struct MonitorResults {
  std::string label;  // monitor id; 1N carries its setting ("1N-obs", "1N-int")
  std::string monitor_id;
  Setting setting = Setting::Observational;
  std::vector<MonitorOutcome> replicates;

  std::vector<std::optional<std::size_t>> alarms() const;
  std::size_t error_count() const;
};

struct CellResult {
  std::string cell;
  std::int64_t horizon = 4000;
  std::size_t batch_size = 50;
  std::optional<std::int64_t> change_time;
  std::vector<MonitorResults> monitors;
  std::vector<std::string> errors;

  std::size_t batch_count() const { return static_cast<std::size_t>((horizon + batch_size - 1) / batch_size); }
  const MonitorResults* find(const std::string& label) const;
};

struct GridResult {
  std::vector<CellResult> cells;
  const CellResult* find(const std::string& cell) const;
};

std::string monitor_label(const std::string& id, Setting setting);

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every config; configs sharing a cell name are reported together.
/// Replicate r of every config with the same plan key reuses one assignment
/// stream and one set of schedules. Output is independent of `workers`.
GridResult run_grid(std::span<const ScenarioConfig> configs, std::size_t workers,
                    const ProgressCallback& progress = {});

struct GridOptions {
  bool include_null = true;
  bool include_sudden = true;
  bool include_gradual = true;
  std::size_t null_replicates = 0;  // 0: same as base
};

/// Null cell (least-favourable null outcomes), 12 sudden cells
/// (arm x subgroup x magnitude) and 12 gradual cells, each run under both
/// settings: observational {1N, 1O, 2O, 3O}, interventional {1N, 1I, 2I, 3I}.
std::vector<ScenarioConfig> default_grid(const ScenarioConfig& base, const GridOptions& options = {});

std::string sudden_cell_name(int arm, const std::string& subgroup, double magnitude);
std::string gradual_cell_name(int arm, const std::string& subgroup, double magnitude);

}  // namespace causalmon
