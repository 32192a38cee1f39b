#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "causalmon/errors.hpp"
#include "causalmon/harness.hpp"
#include "causalmon/reports.hpp"
#include "oracles.hpp"

using namespace causalmon;

namespace {

ScenarioConfig small_config(Setting setting) {
  ScenarioConfig c;
  c.setting = setting;
  c.horizon = 1000;
  c.replicates = 3;
  c.calibration_n = 20000;
  c.weight_estimation_n = 5000;
  c.pre_monitoring_n = 2000;
  c.bootstrap_paths = 100;
  c.master_seed = 4242;
  c.monitors = setting == Setting::Observational ? std::vector<std::string>{"1N", "1O", "2O", "3O"}
                                                 : std::vector<std::string>{"1N", "1I", "2I", "3I"};
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("causalmon_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Power, EstimateExamples) {
  const std::vector<std::optional<std::size_t>> alarms = {2, std::nullopt, 6};
  EXPECT_NEAR(estimate_power(alarms, 4), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(estimate_power(alarms, 1000), 2.0 / 3.0, 1e-15);
  const std::vector<std::optional<std::size_t>> none(5);
  for (std::size_t b = 1; b < 10; ++b) EXPECT_EQ(estimate_power(none, b), 0.0);
}

TEST(Power, CurveMonotoneWithBinomialError) {
  const std::vector<std::optional<std::size_t>> alarms = {3, 1, std::nullopt, 3};
  const auto curve = power_curve("x", alarms, 5);
  EXPECT_EQ(curve.power, (std::vector<double>{0.25, 0.25, 0.75, 0.75, 0.75}));
  EXPECT_NEAR(curve.mc_se[2], std::sqrt(0.75 * 0.25 / 4), 1e-15);
}

TEST(Power, MedianCountsMissingAlarmsAsInfinite) {
  EXPECT_EQ(median_alarm_batch(std::vector<std::optional<std::size_t>>{4, 2, std::nullopt}), 4.0);
  EXPECT_EQ(median_alarm_batch(std::vector<std::optional<std::size_t>>{4, 2, std::nullopt, 10}), 7.0);
  EXPECT_FALSE(median_alarm_batch(std::vector<std::optional<std::size_t>>{4, std::nullopt, std::nullopt}));
}

TEST(Calibration, ThresholdsAreStandaloneMinusDrop) {
  const auto subgroups = monitored_subgroups();
  const auto th = calibrate_thresholds(RiskModel::oracle(), subgroups, 50000, 9, 0.02);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(th.overall[i], th.standalone[i] - 0.02);
    EXPECT_EQ(th.by_subgroup[0][i], th.overall[i]);
  }
}

TEST(Calibration, OraclePpvEqualsMeanPredictedRisk) {
  // For a calibrated model PPV(a) = E[f | yhat = 1, arm a]; NPV(a) = E[1 - f | yhat = 0].
  const std::size_t n = 200000;
  const auto th = calibrate_thresholds(RiskModel::oracle(), monitored_subgroups(), n, 10, 0.02);
  SplitMix64 rng(12345);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int a = 0; a <= 1; ++a) {
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < n; ++i) {
      const double x1 = g(rng), x2 = g(rng);
      const double f = oracle::sigmoid(oracle::true_logit(x1, x2, a));
      (f > 0.5 ? pos : neg).push_back(f > 0.5 ? f : 1.0 - f);
    }
    const auto p = oracle::mean_se(pos), q = oracle::mean_se(neg);
    // combined error: the calibration sample adds Bernoulli noise on top
    const double se_p = std::sqrt(2.0 * p.se * p.se + 0.25 / pos.size());
    const double se_q = std::sqrt(2.0 * q.se * q.se + 0.25 / neg.size());
    EXPECT_LT(std::abs(th.standalone[2 * a + 1] - p.mean), 3.0 * se_p) << "PPV a=" << a;
    EXPECT_LT(std::abs(th.standalone[2 * a] - q.mean), 3.0 * se_q) << "NPV a=" << a;
  }
}

TEST(Scenario, InterventionalMonitorsRefusedUnderObservationalSetting) {
  auto c = small_config(Setting::Observational);
  for (const char* id : {"1I", "2I", "3I"}) {
    c.monitors = {id};
    EXPECT_THROW(c.validate(), InputError) << id;
  }
  c.monitors = {"1O"};
  c.pre_monitoring_n = 0;
  EXPECT_THROW(c.validate(), InputError);
  c.monitors = {"9Z"};
  EXPECT_THROW(c.validate(), InputError);
}

TEST(Replicate, DeterministicInSeedAndIndex) {
  const auto c = small_config(Setting::Interventional);
  const auto plan = prepare_plan(c);
  const auto r1 = run_replicate(plan, c, 1);
  const auto r2 = run_replicate(plan, c, 1);
  ASSERT_EQ(r1.outcomes.size(), 4u);
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_EQ(r1.outcomes[m].alarm_batch, r2.outcomes[m].alarm_batch);
    EXPECT_EQ(r1.charts[m], r2.charts[m]);
  }
}

TEST(Replicate, ZeroMagnitudeShiftReproducesNull) {
  const auto null_cfg = small_config(Setting::Observational);
  auto zero = null_cfg;
  zero.cell = "zero";
  zero.shift = ShiftScenario{};
  zero.shift->magnitude = 0.0;
  const auto plan = prepare_plan(null_cfg);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto a = run_replicate(plan, null_cfg, r);
    const auto b = run_replicate(plan, zero, r);
    for (std::size_t m = 0; m < a.charts.size(); ++m) {
      EXPECT_EQ(a.charts[m], b.charts[m]);
      EXPECT_EQ(a.outcomes[m].alarm_batch, b.outcomes[m].alarm_batch);
    }
  }
}

TEST(Replicate, StandaloneRunMatchesPlanRun) {
  const auto c = small_config(Setting::Observational);
  const auto plan = prepare_plan(c);
  const auto a = run_replicate(c, 2);
  const auto b = run_replicate(plan, c, 2);
  EXPECT_EQ(a.charts, b.charts);
}

TEST(Grid, EmptyConfigListGivesEmptyReport) {
  const auto grid = run_grid({}, 2);
  EXPECT_TRUE(grid.cells.empty());
  const auto dir = scratch_dir("empty");
  write_reports(grid, dir);
  std::ifstream in(dir / "summary.csv");
  std::string header, extra;
  std::getline(in, header);
  EXPECT_EQ(header, "cell,monitor,type_i_or_power_final,median_delay_batches");
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(Grid, DefaultGridEnumeratesTwentyFiveCells) {
  auto base = small_config(Setting::Observational);
  base.replicates = 2;
  const auto configs = default_grid(base);
  EXPECT_EQ(configs.size(), 50u);
  const auto grid = run_grid(configs, 2);
  ASSERT_EQ(grid.cells.size(), 25u);
  const auto dir = scratch_dir("grid");
  write_reports(grid, dir, true);
  std::size_t power_files = 0, svg_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    power_files += name.rfind("power_", 0) == 0 && entry.path().extension() == ".csv";
    svg_files += entry.path().extension() == ".svg";
  }
  EXPECT_EQ(power_files, 25u);
  EXPECT_EQ(svg_files, 25u);
  for (const auto& cell : grid.cells) {
    EXPECT_EQ(cell.monitors.size(), 8u) << cell.cell;
    for (const auto& curve : cell_power_curves(cell)) {
      for (std::size_t b = 0; b < curve.power.size(); ++b) {
        ASSERT_GE(curve.power[b], 0.0);
        ASSERT_LE(curve.power[b], 1.0);
        if (b > 0) ASSERT_GE(curve.power[b], curve.power[b - 1]);
      }
    }
  }
  EXPECT_NE(grid.find("sudden_a1_known_m10"), nullptr);
  EXPECT_NE(grid.find("gradual_a0_misspec_m20"), nullptr);
  EXPECT_NE(grid.find("null"), nullptr);
}

TEST(Grid, WorkerCountDoesNotChangeResults) {
  auto obs = small_config(Setting::Observational);
  auto inter = small_config(Setting::Interventional);
  obs.shift = ShiftScenario{};
  inter.shift = obs.shift;
  obs.cell = inter.cell = "shifted";
  const std::vector<ScenarioConfig> configs = {obs, inter};
  const auto one = summarize(run_grid(configs, 1));
  const auto three = summarize(run_grid(configs, 3));
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].final_rate, three[i].final_rate);
    EXPECT_EQ(one[i].median_delay_batches, three[i].median_delay_batches);
  }
}
