#include "causalmon/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"
#include "causalmon/parallel.hpp"

namespace causalmon {

namespace {

bool is_known_monitor(const std::string& id) {
  return std::find(kMonitorIds.begin(), kMonitorIds.end(), id) != kMonitorIds.end();
}

bool is_interventional_monitor(const std::string& id) { return id.size() == 2 && id[1] == 'I'; }

bool needs_pre_monitoring(const std::string& id) { return id == "1O" || id == "2O"; }

std::size_t monitor_rank(const std::string& id) {
  return static_cast<std::size_t>(std::find(kMonitorIds.begin(), kMonitorIds.end(), id) - kMonitorIds.begin());
}

std::string magnitude_tag(double magnitude) {
  return "m" + std::to_string(static_cast<int>(std::lround(magnitude * 100.0)));
}

std::vector<std::string> ordered_union(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::string> out(a.begin(), a.end());
  for (const auto& id : b) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const std::string& x, const std::string& y) { return monitor_rank(x) < monitor_rank(y); });
  return out;
}

}  // namespace

std::string to_string(Setting setting) {
  return setting == Setting::Observational ? "observational" : "interventional";
}

Setting setting_from_string(const std::string& text) {
  if (text == "observational") return Setting::Observational;
  if (text == "interventional") return Setting::Interventional;
  throw InputError("unknown setting: " + text);
}

std::string to_string(ModelChoice choice) { return choice == ModelChoice::Oracle ? "oracle" : "fitted"; }

ModelChoice model_choice_from_string(const std::string& text) {
  if (text == "oracle") return ModelChoice::Oracle;
  if (text == "fitted") return ModelChoice::Fitted;
  throw InputError("unknown model choice: " + text);
}

void ScenarioConfig::validate() const {
  if (horizon < 1) throw InputError(cell + ": horizon must be >= 1");
  if (batch_size == 0) throw InputError(cell + ": batch_size must be >= 1");
  if (replicates == 0) throw InputError(cell + ": replicates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError(cell + ": alpha must lie in (0, 1)");
  if (!(delta >= 0.0 && delta < 0.5)) throw InputError(cell + ": delta must lie in [0, 0.5)");
  if (calibration_n < 10000) throw InputError(cell + ": calibration_n must be >= 10000");
  if (bootstrap_paths < 100) throw InputError(cell + ": bootstrap_paths must be >= 100");
  if (weight_estimation_n < 2) throw InputError(cell + ": weight_estimation_n must be >= 2");
  if (model == ModelChoice::Fitted && model_training_n < 2 * RiskModel::coefficient_count(kCovariateDimension)) {
    throw InputError(cell + ": model_training_n too small for the fitted model");
  }
  if (shift) shift->validate();
  for (const auto& id : monitors) {
    if (!is_known_monitor(id)) throw InputError(cell + ": unknown monitor '" + id + "'");
    if (setting == Setting::Observational && is_interventional_monitor(id)) {
      throw InputError(cell + ": monitor " + id + " needs known randomisation weights and cannot run in the "
                       "observational setting");
    }
    if (needs_pre_monitoring(id) && pre_monitoring_n == 0) {
      throw InputError(cell + ": monitor " + id + " requires a pre-monitoring phase (pre_monitoring_n > 0)");
    }
  }
}

StreamSettings ScenarioConfig::stream_settings() const {
  StreamSettings s;
  s.horizon = horizon;
  s.shift = shift;
  s.baseline = baseline;
  s.delta = delta;
  return s;
}

std::string plan_key(const ScenarioConfig& c) {
  std::ostringstream key;
  key << to_string(c.setting) << '|' << c.horizon << '|' << c.batch_size << '|' << c.master_seed << '|'
      << format_double(c.delta) << '|' << format_double(c.alpha) << '|' << c.pre_monitoring_n << '|'
      << c.calibration_n << '|' << c.weight_estimation_n << '|' << c.bootstrap_paths << '|'
      << to_string(c.observational_propensity) << '|' << static_cast<int>(c.bootstrap_null) << '|'
      << to_string(c.model) << '|' << c.model_training_n << '|' << format_double(c.threshold_drop);
  return key.str();
}

ThresholdSet calibrate_thresholds(const RiskModel& model, std::span<const Subgroup> subgroups,
                                  std::size_t calibration_n, std::uint64_t seed, double drop) {
  if (calibration_n == 0) throw InputError("calibrate_thresholds: calibration_n must be positive");
  const std::size_t k_count = subgroups.size();
  // [cell] -> (hits, predictions); cell = 2a + v
  std::array<std::size_t, 4> hits{}, totals{};
  std::vector<std::array<std::size_t, 4>> sub_hits(k_count), sub_totals(k_count);

  for (std::size_t i = 0; i < calibration_n; ++i) {
    SplitMix64 cov_rng(seed, i, purpose::kCovariates);
    const auto x = sample_covariates(cov_rng, model.dimension());
    std::vector<char> membership(k_count);
    for (std::size_t k = 0; k < k_count; ++k) membership[k] = subgroups[k].contains(x) ? 1 : 0;
    for (int a = 0; a <= 1; ++a) {
      SplitMix64 out_rng(seed, i, a == 1 ? purpose::kOutcomeTreated : purpose::kOutcomeControl);
      const int y = bernoulli(out_rng, true_risk_pre(x, a));
      const int yhat = model.binarize(x, a);
      const auto cell = static_cast<std::size_t>(2 * a + yhat);
      ++totals[cell];
      if (y == yhat) ++hits[cell];
      for (std::size_t k = 0; k < k_count; ++k) {
        if (!membership[k]) continue;
        ++sub_totals[k][cell];
        if (y == yhat) ++sub_hits[k][cell];
      }
    }
  }

  auto cell_name = [](std::size_t cell) {
    return std::string(cell % 2 == 1 ? "PPV" : "NPV") + "(a=" + std::to_string(cell / 2) + ")";
  };

  ThresholdSet out;
  out.drop = drop;
  out.subgroups.assign(subgroups.begin(), subgroups.end());
  out.counts = totals;
  for (std::size_t cell = 0; cell < 4; ++cell) {
    if (totals[cell] == 0) {
      throw DegenerateCellError("calibrate_thresholds: no predictions for " + cell_name(cell), cell_name(cell));
    }
    out.standalone[cell] = static_cast<double>(hits[cell]) / static_cast<double>(totals[cell]);
    out.overall[cell] = out.standalone[cell] - drop;
  }
  out.standalone_by_subgroup.resize(k_count);
  out.by_subgroup.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t cell = 0; cell < 4; ++cell) {
      if (sub_totals[k][cell] == 0) {
        const std::string name = cell_name(cell) + " in " + subgroups[k].name;
        throw DegenerateCellError("calibrate_thresholds: no predictions for " + name, name);
      }
      out.standalone_by_subgroup[k][cell] =
          static_cast<double>(sub_hits[k][cell]) / static_cast<double>(sub_totals[k][cell]);
      out.by_subgroup[k][cell] = out.standalone_by_subgroup[k][cell] - drop;
    }
  }
  return out;
}

RiskModel build_model(const ScenarioConfig& config) {
  if (config.model == ModelChoice::Oracle) return RiskModel::oracle();
  const std::uint64_t seed = derive_seed(config.master_seed, "model-training");
  std::vector<TrainingExample> data(config.model_training_n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    SplitMix64 cov_rng(seed, i, purpose::kCovariates);
    data[i].x = sample_covariates(cov_rng);
    // Pre-deployment data: treatment assigned uniformly at random.
    SplitMix64 treat_rng(seed, i, purpose::kTreatment);
    data[i].a = bernoulli(treat_rng, 0.5);
    SplitMix64 out_rng(seed, i, data[i].a == 1 ? purpose::kOutcomeTreated : purpose::kOutcomeControl);
    data[i].y = bernoulli(out_rng, true_risk_pre(data[i].x, data[i].a));
  }
  return fit_risk_model(data, kCovariateDimension);
}

MonitorSpec make_monitor(const std::string& id, Setting setting, const ThresholdSet& thresholds, double delta,
                         std::size_t batch_size, double binarize_threshold, PropensitySource observational_propensity,
                         const std::optional<PropensityModel>& estimated) {
  if (!is_known_monitor(id)) throw InputError("unknown monitor: " + id);
  if (setting == Setting::Observational && is_interventional_monitor(id)) {
    throw InputError("monitor " + id + " cannot run in the observational setting");
  }
  MonitorSpec spec;
  spec.id = id;
  spec.delta = delta;
  spec.batch_size = batch_size;
  spec.binarize_threshold = binarize_threshold;

  Weighting ipw = Weighting::IpwOracle;
  if (id[1] == 'O' && observational_propensity == PropensitySource::Estimated) {
    if (!estimated) throw InputError("monitor " + id + " needs a fitted propensity model");
    ipw = Weighting::IpwEstimated;
    spec.estimated_propensity = estimated;
  }

  switch (id[0]) {
    case '1':
      spec.criterion = Criterion::C1;
      spec.weighting = id[1] == 'N' ? Weighting::Naive : ipw;
      spec.thresholds.assign(thresholds.overall.begin(), thresholds.overall.end());
      break;
    case '2':
      spec.criterion = Criterion::C2;
      spec.weighting = ipw;
      spec.subgroups = thresholds.subgroups;
      for (const auto& cells : thresholds.by_subgroup) spec.thresholds.insert(spec.thresholds.end(), cells.begin(), cells.end());
      break;
    case '3':
      spec.criterion = Criterion::C3;
      spec.weighting = Weighting::None;
      spec.subgroups = thresholds.subgroups;
      break;
    default: throw InputError("unknown monitor: " + id);
  }
  spec.validate();
  return spec;
}

MonitoringPlan prepare_plan(const ScenarioConfig& config, std::span<const std::string> monitor_ids) {
  config.validate();
  MonitoringPlan plan;
  plan.config = config;
  std::vector<std::string> ids(monitor_ids.begin(), monitor_ids.end());
  if (ids.empty()) ids = config.monitors;
  plan.config.monitors = ids;
  {
    ScenarioConfig check = config;
    check.monitors = ids;
    check.validate();
  }

  plan.model = build_model(config);
  plan.assignment =
      config.setting == Setting::Observational ? PropensityModel::observational() : PropensityModel::interventional();
  const auto subgroups = monitored_subgroups();
  plan.thresholds = calibrate_thresholds(plan.model, subgroups, config.calibration_n,
                                         derive_seed(config.master_seed, "calibration"), config.threshold_drop);

  const bool wants_fit = config.observational_propensity == PropensitySource::Estimated &&
                         std::any_of(ids.begin(), ids.end(), needs_pre_monitoring);
  if (wants_fit) {
    StreamSettings pre;
    pre.horizon = static_cast<std::int64_t>(config.pre_monitoring_n);
    const std::uint64_t seed = derive_seed(config.master_seed, "pre-monitoring-" + to_string(config.setting));
    const auto records =
        generate_stream(pre, plan.model, plan.assignment, {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)});
    plan.estimated = fit_propensity(records);
  }
  const std::optional<PropensityModel> estimated =
      plan.estimated ? std::optional<PropensityModel>(plan.estimated->model) : std::nullopt;

  std::vector<ObservationRecord> weight_stream;
  for (const auto& id : ids) {
    try {
      MonitorSpec spec = make_monitor(id, config.setting, plan.thresholds, config.delta, config.batch_size,
                                      plan.model.threshold(), config.observational_propensity, estimated);
      if (spec.criterion != Criterion::C1) {
        if (weight_stream.empty()) {
          StreamSettings pre;
          pre.horizon = static_cast<std::int64_t>(config.weight_estimation_n);
          const std::uint64_t seed = derive_seed(config.master_seed, "weights-" + to_string(config.setting));
          weight_stream = generate_stream(pre, plan.model, plan.assignment,
                                          {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)});
        }
        spec.weights = estimate_subgroup_weights(weight_stream, spec);
      }
      plan.monitors.push_back(std::move(spec));
      plan.monitor_errors.emplace_back();
    } catch (const std::exception& e) {
      MonitorSpec placeholder;
      placeholder.id = id;
      plan.monitors.push_back(std::move(placeholder));
      plan.monitor_errors.emplace_back(e.what());
    }
  }
  return plan;
}

ReplicateSeeds replicate_seeds(std::uint64_t master_seed, Setting setting, std::size_t replicate) {
  ReplicateSeeds seeds;
  seeds.stream.covariates = derive_seed(derive_seed(master_seed, "replicate-covariates"), replicate);
  seeds.stream.outcomes = derive_seed(derive_seed(master_seed, "replicate-outcomes"), replicate);
  seeds.stream.treatment = derive_seed(derive_seed(master_seed, "replicate-treatment-" + to_string(setting)), replicate);
  seeds.bootstrap = derive_seed(derive_seed(master_seed, "bootstrap-" + to_string(setting)), replicate);
  return seeds;
}

ReplicateContext prepare_replicate(const MonitoringPlan& plan, std::size_t replicate) {
  const ScenarioConfig& cfg = plan.config;
  const ReplicateSeeds seeds = replicate_seeds(cfg.master_seed, cfg.setting, replicate);
  ReplicateContext ctx;
  ctx.replicate = replicate;
  ctx.outcome_seed = seeds.stream.outcomes;
  ctx.records = generate_assignments(cfg.horizon, plan.model, plan.assignment, seeds.stream);

  const std::size_t m = plan.monitors.size();
  ctx.tables.resize(m);
  ctx.schedules.resize(m);
  ctx.errors = plan.monitor_errors;
  std::vector<const IncrementTable*> tables;
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < m; ++i) {
    if (!ctx.errors[i].empty()) continue;
    try {
      ctx.tables[i] = IncrementTable::build(plan.monitors[i], ctx.records);
    } catch (const std::exception& e) {
      ctx.errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (ctx.tables[i]) {
      tables.push_back(&*ctx.tables[i]);
      owners.push_back(i);
    }
  }
  if (tables.empty()) return ctx;

  BootstrapConfig boot;
  boot.paths = cfg.bootstrap_paths;
  boot.delta = cfg.delta;
  boot.variant = cfg.bootstrap_null;
  boot.seed = seeds.bootstrap;
  const auto paths = bootstrap_paths(ctx.records, tables, boot);
  const auto spend =
      uniform_spending_schedule(cfg.alpha, tables.front()->batch_count(), cfg.batch_size, cfg.horizon);
  for (std::size_t j = 0; j < tables.size(); ++j) {
    try {
      ctx.schedules[owners[j]] = compute_dcl(paths[j], spend, cfg.alpha);
    } catch (const std::exception& e) {
      ctx.errors[owners[j]] = e.what();
    }
  }
  return ctx;
}

ReplicateResult evaluate_replicate(const MonitoringPlan& plan, const ReplicateContext& ctx,
                                   const ScenarioConfig& scenario) {
  if (plan_key(scenario) != plan_key(plan.config)) throw InputError("scenario does not match the monitoring plan");
  std::vector<ObservationRecord> records = ctx.records;
  draw_outcomes(records, scenario.stream_settings(), ctx.outcome_seed);
  const auto y = observed_outcomes(records);

  ReplicateResult result;
  for (const auto& id : scenario.monitors) {
    const auto it = std::find_if(plan.monitors.begin(), plan.monitors.end(),
                                 [&](const MonitorSpec& s) { return s.id == id; });
    if (it == plan.monitors.end()) throw InputError("monitor " + id + " is not part of the plan");
    const auto i = static_cast<std::size_t>(it - plan.monitors.begin());
    result.monitor_ids.push_back(id);
    MonitorOutcome outcome;
    std::vector<double> chart;
    if (!ctx.errors[i].empty() || !ctx.tables[i] || !ctx.schedules[i]) {
      outcome.error = ctx.errors[i].empty() ? "monitor unavailable" : ctx.errors[i];
    } else {
      chart = ctx.tables[i]->chart(y);
      outcome.alarm_batch = alarm_check(chart, *ctx.schedules[i]);
    }
    result.outcomes.push_back(std::move(outcome));
    result.charts.push_back(std::move(chart));
  }
  return result;
}

ReplicateResult run_replicate(const MonitoringPlan& plan, const ScenarioConfig& scenario, std::size_t replicate_index) {
  const ReplicateContext ctx = prepare_replicate(plan, replicate_index);
  return evaluate_replicate(plan, ctx, scenario);
}

ReplicateResult run_replicate(const ScenarioConfig& scenario, std::size_t replicate_index) {
  const MonitoringPlan plan = prepare_plan(scenario);
  return run_replicate(plan, scenario, replicate_index);
}

double estimate_power(std::span<const std::optional<std::size_t>> alarms, std::size_t batch) {
  if (alarms.empty()) throw InputError("estimate_power: no replicates");
  std::size_t hits = 0;
  for (const auto& a : alarms) {
    if (a && *a <= batch) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(alarms.size());
}

PowerCurve power_curve(const std::string& monitor, std::span<const std::optional<std::size_t>> alarms,
                       std::size_t batch_count) {
  PowerCurve curve;
  curve.monitor = monitor;
  const double r = static_cast<double>(alarms.size());
  for (std::size_t b = 1; b <= batch_count; ++b) {
    const double p = estimate_power(alarms, b);
    curve.power.push_back(p);
    curve.mc_se.push_back(std::sqrt(p * (1.0 - p) / r));
  }
  return curve;
}

std::optional<double> median_alarm_batch(std::span<const std::optional<std::size_t>> alarms) {
  if (alarms.empty()) return std::nullopt;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> v;
  v.reserve(alarms.size());
  for (const auto& a : alarms) v.push_back(a ? static_cast<double>(*a) : inf);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (std::isinf(median)) return std::nullopt;
  return median;
}

std::vector<std::optional<std::size_t>> MonitorResults::alarms() const {
  std::vector<std::optional<std::size_t>> out;
  out.reserve(replicates.size());
  for (const auto& r : replicates) out.push_back(r.alarm_batch);
  return out;
}

std::size_t MonitorResults::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(replicates.begin(), replicates.end(), [](const MonitorOutcome& o) { return !o.error.empty(); }));
}

const MonitorResults* CellResult::find(const std::string& label) const {
  for (const auto& m : monitors) {
    if (m.label == label) return &m;
  }
  return nullptr;
}

const CellResult* GridResult::find(const std::string& cell) const {
  for (const auto& c : cells) {
    if (c.cell == cell) return &c;
  }
  return nullptr;
}

std::vector<std::string> setting_monitors(Setting setting) {
  if (setting == Setting::Observational) return {"1N", "1O", "2O", "3O"};
  return {"1N", "1I", "2I", "3I"};
}

std::string monitor_label(const std::string& id, Setting setting) {
  if (id == "1N") return setting == Setting::Observational ? "1N-obs" : "1N-int";
  return id;
}

GridResult run_grid(std::span<const ScenarioConfig> configs, std::size_t workers, const ProgressCallback& progress) {
  GridResult grid;
  if (configs.empty()) return grid;
  for (const auto& c : configs) c.validate();

  // Families of configs that share a plan.
  struct Family {
    std::vector<std::size_t> members;
    std::vector<std::string> monitors;
    std::size_t max_replicates = 0;
    std::optional<MonitoringPlan> plan;
    std::string error;
  };
  std::vector<Family> families;
  std::map<std::string, std::size_t> family_of_key;
  std::vector<std::size_t> family_of(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string key = plan_key(configs[i]);
    auto [it, inserted] = family_of_key.emplace(key, families.size());
    if (inserted) families.emplace_back();
    Family& f = families[it->second];
    f.members.push_back(i);
    f.monitors = ordered_union(f.monitors, configs[i].monitors);
    f.max_replicates = std::max(f.max_replicates, configs[i].replicates);
    family_of[i] = it->second;
  }
  for (auto& f : families) {
    try {
      f.plan = prepare_plan(configs[f.members.front()], f.monitors);
    } catch (const std::exception& e) {
      f.error = e.what();
    }
  }

  // results[config][monitor][replicate]
  std::vector<std::vector<std::vector<MonitorOutcome>>> results(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    results[i].assign(configs[i].monitors.size(), std::vector<MonitorOutcome>(configs[i].replicates));
  }

  struct Job {
    std::size_t family;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < families.size(); ++f) {
    if (!families[f].plan) continue;
    for (std::size_t r = 0; r < families[f].max_replicates; ++r) jobs.push_back({f, r});
  }

  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const Job job = jobs[j];
    const Family& f = families[job.family];
    const ReplicateContext ctx = prepare_replicate(*f.plan, job.replicate);
    for (std::size_t member : f.members) {
      const ScenarioConfig& cfg = configs[member];
      if (job.replicate >= cfg.replicates) continue;
      ReplicateResult rr = evaluate_replicate(*f.plan, ctx, cfg);
      for (std::size_t m = 0; m < rr.outcomes.size(); ++m) results[member][m][job.replicate] = std::move(rr.outcomes[m]);
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, jobs.size());
    }
  });

  // Assemble cells in first-appearance order.
  std::map<std::string, std::size_t> cell_index;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const ScenarioConfig& cfg = configs[i];
    auto [it, inserted] = cell_index.emplace(cfg.cell, grid.cells.size());
    if (inserted) {
      CellResult cell;
      cell.cell = cfg.cell;
      cell.horizon = cfg.horizon;
      cell.batch_size = cfg.batch_size;
      if (cfg.shift) cell.change_time = cfg.shift->change_time;
      grid.cells.push_back(std::move(cell));
    }
    CellResult& cell = grid.cells[it->second];
    if (cell.horizon != cfg.horizon || cell.batch_size != cfg.batch_size) {
      throw InputError("cell " + cfg.cell + ": configs disagree on horizon or batch size");
    }
    const Family& f = families[family_of[i]];
    if (!f.error.empty()) cell.errors.push_back(to_string(cfg.setting) + ": " + f.error);
    for (std::size_t m = 0; m < cfg.monitors.size(); ++m) {
      MonitorResults mr;
      mr.monitor_id = cfg.monitors[m];
      mr.setting = cfg.setting;
      mr.label = monitor_label(cfg.monitors[m], cfg.setting);
      if (cell.find(mr.label)) throw InputError("cell " + cfg.cell + ": monitor " + mr.label + " listed twice");
      mr.replicates = std::move(results[i][m]);
      if (!f.error.empty()) {
        for (auto& o : mr.replicates) o.error = f.error;
      }
      cell.monitors.push_back(std::move(mr));
    }
  }
  return grid;
}

std::string sudden_cell_name(int arm, const std::string& subgroup, double magnitude) {
  return "sudden_a" + std::to_string(arm) + "_" + subgroup + "_" + magnitude_tag(magnitude);
}

std::string gradual_cell_name(int arm, const std::string& subgroup, double magnitude) {
  return "gradual_a" + std::to_string(arm) + "_" + subgroup + "_" + magnitude_tag(magnitude);
}

std::vector<ScenarioConfig> default_grid(const ScenarioConfig& base, const GridOptions& options) {
  std::vector<ScenarioConfig> out;
  auto add_cell = [&](const std::string& name, std::optional<ShiftScenario> shift, OutcomeBaseline baseline,
                      std::size_t replicates) {
    ScenarioConfig obs = base;
    obs.cell = name;
    obs.shift = shift;
    obs.baseline = baseline;
    obs.replicates = replicates;
    obs.setting = Setting::Observational;
    obs.monitors = setting_monitors(Setting::Observational);
    ScenarioConfig intv = obs;
    intv.setting = Setting::Interventional;
    intv.monitors = setting_monitors(Setting::Interventional);
    out.push_back(std::move(obs));
    out.push_back(std::move(intv));
  };

  if (options.include_null) {
    add_cell("null", std::nullopt, OutcomeBaseline::WorstCaseNull,
             options.null_replicates ? options.null_replicates : base.replicates);
  }
  const std::array<std::string, 3> subgroups = {"all", "known", "misspec"};
  for (ShiftShape shape : {ShiftShape::Sudden, ShiftShape::Gradual}) {
    if (shape == ShiftShape::Sudden && !options.include_sudden) continue;
    if (shape == ShiftShape::Gradual && !options.include_gradual) continue;
    for (double magnitude : {0.10, 0.20}) {
      for (int arm : {0, 1}) {
        for (const auto& sg : subgroups) {
          ShiftScenario shift;
          shift.shifted_arm = arm;
          shift.shifted_subgroup = subgroup_by_name(sg);
          shift.magnitude = magnitude;
          shift.shape = shape;
          const std::string name = shape == ShiftShape::Sudden ? sudden_cell_name(arm, sg, magnitude)
                                                               : gradual_cell_name(arm, sg, magnitude);
          add_cell(name, shift, OutcomeBaseline::Oracle, base.replicates);
        }
      }
    }
  }
  return out;
}

}  // namespace causalmon
