// causalmon: threshold calibration, grid runs and reporting.
//
//   causalmon calibrate [--seed S] [--calibration-n N] [--model oracle|fitted] [--out FILE]
//   causalmon run --config FILE --out DIR [--workers N] [--no-svg]
//   causalmon report --in DIR
//   causalmon simulate --setting observational --horizon 4000 --seed S --out stream.csv

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include "causalmon/config.hpp"
#include "causalmon/errors.hpp"
#include "causalmon/harness.hpp"
#include "causalmon/kv_format.hpp"
#include "causalmon/reports.hpp"
#include "causalmon/simulator.hpp"

namespace cm = causalmon;

namespace {

int cmd_calibrate(std::uint64_t seed, std::size_t calibration_n, const std::string& model_name, double drop,
                  const std::string& out_path, const std::string& model_out) {
  cm::ScenarioConfig cfg;
  cfg.master_seed = seed;
  cfg.model = cm::model_choice_from_string(model_name);
  const cm::RiskModel model = cm::build_model(cfg);
  const auto subgroups = cm::monitored_subgroups();
  const cm::ThresholdSet th =
      cm::calibrate_thresholds(model, subgroups, calibration_n, cm::derive_seed(seed, "calibration"), drop);

  cm::KeyValueRecord kv;
  kv.set("kind", std::string("thresholds"));
  kv.set("drop", drop);
  kv.set("calibration_n", std::to_string(calibration_n));
  auto put = [&](const std::string& prefix, const std::array<double, 4>& standalone,
                 const std::array<double, 4>& thresholds) {
    for (int a = 0; a <= 1; ++a) {
      kv.set(prefix + "ppv.a" + std::to_string(a), standalone[2 * a + 1]);
      kv.set(prefix + "npv.a" + std::to_string(a), standalone[2 * a]);
      kv.set(prefix + "c.a" + std::to_string(a) + ".v1", thresholds[2 * a + 1]);
      kv.set(prefix + "c.a" + std::to_string(a) + ".v0", thresholds[2 * a]);
    }
  };
  put("overall.", th.standalone, th.overall);
  for (std::size_t k = 0; k < subgroups.size(); ++k) {
    put(subgroups[k].name + ".", th.standalone_by_subgroup[k], th.by_subgroup[k]);
  }
  if (out_path.empty()) {
    kv.write(std::cout);
  } else {
    std::ofstream out(out_path);
    kv.write(out);
    std::cout << "wrote " << out_path << '\n';
  }
  if (!model_out.empty()) {
    std::ofstream out(model_out);
    model.save(out);
    std::cout << "wrote " << model_out << '\n';
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::size_t workers, bool svg, bool quiet) {
  const cm::RunConfig run = cm::load_run_config(config_path);
  if (workers == 0) workers = run.workers.value_or(std::max(1u, std::thread::hardware_concurrency()));
  const auto start = std::chrono::steady_clock::now();
  cm::ProgressCallback progress;
  if (!quiet) {
    progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 50 == 0) std::cerr << "\r" << done << "/" << total << " replicate jobs" << std::flush;
    };
  }
  const cm::GridResult grid = cm::run_grid(run.scenarios, workers, progress);
  if (!quiet) std::cerr << '\n';
  cm::write_reports(grid, out_dir, svg);
  {
    std::ofstream resolved(std::filesystem::path(out_dir) / "config_resolved.json");
    resolved << cm::scenarios_to_json(run.scenarios) << '\n';
  }
  const auto rows = cm::summarize(grid);
  if (!quiet) cm::print_summary_table(std::cout, rows);
  for (const auto& cell : grid.cells) {
    for (const auto& e : cell.errors) std::cerr << "cell " << cell.cell << ": " << e << '\n';
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << grid.cells.size() << " cells written to " << out_dir << " in " << seconds << " s\n";
  return 0;
}

int cmd_report(const std::string& in_dir, bool svg) {
  const cm::LoadedReport report = cm::read_report(in_dir);
  cm::print_summary_table(std::cout, report.summary);
  if (svg) {
    for (const auto& [cell, curves] : report.curves) {
      const auto& meta = report.cells.at(cell);
      std::ofstream out(std::filesystem::path(in_dir) / ("plot_" + cell + ".svg"));
      out << cm::render_power_svg(cell, curves, meta.batch_size, meta.horizon, meta.change_time);
    }
  }
  return 0;
}

int cmd_simulate(const std::string& setting_name, std::int64_t horizon, std::uint64_t seed, int shift_arm,
                 const std::string& shift_subgroup, double magnitude, const std::string& baseline,
                 const std::string& out_path) {
  cm::ScenarioConfig cfg;
  cfg.setting = cm::setting_from_string(setting_name);
  cfg.horizon = horizon;
  cfg.master_seed = seed;
  if (magnitude > 0.0) {
    cm::ShiftScenario shift;
    shift.shifted_arm = shift_arm;
    shift.shifted_subgroup = cm::subgroup_by_name(shift_subgroup);
    shift.magnitude = magnitude;
    cfg.shift = shift;
  }
  if (baseline == "worst_case_null") cfg.baseline = cm::OutcomeBaseline::WorstCaseNull;
  else if (baseline != "oracle") throw cm::InputError("unknown baseline: " + baseline);

  const cm::RiskModel model = cm::build_model(cfg);
  const cm::PropensityModel propensity = cfg.setting == cm::Setting::Observational
                                             ? cm::PropensityModel::observational()
                                             : cm::PropensityModel::interventional();
  const auto seeds = cm::replicate_seeds(seed, cfg.setting, 0);
  const auto records = cm::generate_stream(cfg.stream_settings(), model, propensity, seeds.stream);
  const auto range = cm::propensity_range(records);
  std::ofstream out(out_path);
  if (!out) throw cm::InputError("cannot write " + out_path);
  cm::write_stream_csv(out, records);
  std::cout << "wrote " << records.size() << " records to " << out_path << " (propensity range "
            << range.min << " .. " << range.max << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal performance monitoring for deployed risk models"};
  app.require_subcommand(1);

  auto* calibrate = app.add_subcommand("calibrate", "Estimate standalone PPV/NPV and monitoring thresholds");
  std::uint64_t cal_seed = 20240601;
  std::size_t cal_n = 200000;
  std::string cal_model = "oracle", cal_out, cal_model_out;
  double cal_drop = 0.02;
  calibrate->add_option("--seed", cal_seed, "Master seed");
  calibrate->add_option("--calibration-n", cal_n, "Oracle Monte Carlo draws")->check(CLI::Range(10000ul, 100000000ul));
  calibrate->add_option("--model", cal_model, "oracle or fitted")->check(CLI::IsMember({"oracle", "fitted"}));
  calibrate->add_option("--drop", cal_drop, "Allowed drop in PPV/NPV");
  calibrate->add_option("--out", cal_out, "Write thresholds to this key-value file");
  calibrate->add_option("--model-out", cal_model_out, "Write the risk model to this key-value file");

  auto* run = app.add_subcommand("run", "Run scenarios from a JSON config and write reports");
  std::string run_config, run_out;
  std::size_t run_workers = 0;
  bool run_no_svg = false, run_quiet = false;
  run->add_option("--config", run_config, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_option("--workers", run_workers, "Worker threads (default: config value or hardware threads)");
  run->add_flag("--no-svg", run_no_svg, "Skip SVG plots");
  run->add_flag("--quiet", run_quiet, "No progress or summary output");

  auto* report = app.add_subcommand("report", "Print the summary of a run directory and redraw its plots");
  std::string report_in;
  bool report_no_svg = false;
  report->add_option("--in", report_in, "Run output directory")->required()->check(CLI::ExistingDirectory);
  report->add_flag("--no-svg", report_no_svg, "Do not redraw SVG plots");

  auto* simulate = app.add_subcommand("simulate", "Export one simulated stream as CSV");
  std::string sim_setting = "observational", sim_subgroup = "all", sim_out, sim_baseline = "oracle";
  std::int64_t sim_horizon = 4000;
  std::uint64_t sim_seed = 20240601;
  int sim_arm = 1;
  double sim_magnitude = 0.0;
  simulate->add_option("--setting", sim_setting, "Treatment assignment setting")
      ->check(CLI::IsMember({"observational", "interventional"}));
  simulate->add_option("--horizon", sim_horizon, "Number of records")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--shift-arm", sim_arm, "Treatment arm hit by the shift")->check(CLI::Range(0, 1));
  simulate->add_option("--shift-subgroup", sim_subgroup, "Subgroup hit by the shift")
      ->check(CLI::IsMember({"all", "known", "misspec"}));
  simulate->add_option("--magnitude", sim_magnitude, "Shift magnitude (0 disables the shift)")
      ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--baseline", sim_baseline, "Pre-shift outcome model")
      ->check(CLI::IsMember({"oracle", "worst_case_null"}));
  simulate->add_option("--out", sim_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) return cmd_calibrate(cal_seed, cal_n, cal_model, cal_drop, cal_out, cal_model_out);
    if (*run) return cmd_run(run_config, run_out, run_workers, !run_no_svg, run_quiet);
    if (*report) return cmd_report(report_in, !report_no_svg);
    if (*simulate)
      return cmd_simulate(sim_setting, sim_horizon, sim_seed, sim_arm, sim_subgroup, sim_magnitude, sim_baseline,
                          sim_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
