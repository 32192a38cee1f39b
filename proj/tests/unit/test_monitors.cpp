#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "causalmon/errors.hpp"
#include "causalmon/monitors.hpp"
#include "causalmon/simulator.hpp"
#include "oracles.hpp"

using namespace causalmon;

namespace {

ObservationRecord record(int a, int y, double f0, double f1, double p_treat) {
  ObservationRecord r;
  r.x.assign(10, 0.0);
  r.a = a;
  r.y_obs = y;
  (a == 1 ? r.y1 : r.y0) = y;
  r.f0 = f0;
  r.f1 = f1;
  r.propensity_used = p_treat;
  return r;
}

MonitorSpec c1_spec(Weighting weighting, std::vector<double> thresholds = {0.75, 0.75, 0.75, 0.75}) {
  MonitorSpec spec;
  spec.id = "test-c1";
  spec.criterion = Criterion::C1;
  spec.weighting = weighting;
  spec.thresholds = std::move(thresholds);
  return spec;
}

std::vector<ObservationRecord> stream(const PropensityModel& propensity, std::int64_t n, std::uint64_t seed,
                                      OutcomeBaseline baseline = OutcomeBaseline::Oracle) {
  StreamSettings settings;
  settings.horizon = n;
  settings.baseline = baseline;
  return generate_stream(settings, RiskModel::oracle(), propensity, {seed, seed + 1, seed + 2});
}

}  // namespace

TEST(IncrementC1, IpwExample) {
  const auto r = record(1, 1, 0.2, 0.8, 0.25);
  EXPECT_NEAR(increment_c1(r, 1, 1, 0.9, Weighting::IpwOracle), 0.9 - 1.0 / 0.25, 1e-15);
  EXPECT_NEAR(increment_c1(r, 1, 1, 0.9, Weighting::IpwOracle), -3.1, 1e-12);
}

TEST(IncrementC1, WeightTwoAtHalf) {
  const auto r = record(0, 0, 0.3, 0.6, 0.5);
  EXPECT_DOUBLE_EQ(increment_c1(r, 0, 0, 0.8, Weighting::IpwOracle), 0.8 - 2.0);
}

TEST(IncrementC1, NaiveGateClosedWhenPredictionDiffers) {
  const auto r = record(1, 1, 0.2, 0.3, 0.4);
  EXPECT_EQ(increment_c1(r, 1, 1, 0.9, Weighting::Naive), 0.0);
  EXPECT_EQ(increment_c1(r, 0, 0, 0.9, Weighting::Naive), 0.0);  // wrong arm
  EXPECT_DOUBLE_EQ(increment_c1(r, 1, 0, 0.9, Weighting::Naive), 0.9 - 0.0);
}

TEST(IncrementC1, IpwUnobservedArmContributesThreshold) {
  const auto r = record(0, 1, 0.2, 0.8, 0.3);
  EXPECT_DOUBLE_EQ(increment_c1(r, 1, 1, 0.85, Weighting::IpwOracle), 0.85);
}

TEST(IncrementC1, PositivityViolationRaisesUnlessClipped) {
  const auto r = record(1, 1, 0.2, 0.8, 0.0);
  EXPECT_THROW(increment_c1(r, 1, 1, 0.9, Weighting::IpwOracle), PositivityError);
  IncrementContext ctx;
  ctx.weight_clip_epsilon = 0.01;
  EXPECT_NEAR(increment_c1(r, 1, 1, 0.9, Weighting::IpwOracle, ctx), 0.9 - 100.0, 1e-12);
}

TEST(IncrementC2, SubgroupGateAndWeight) {
  auto r = record(1, 1, 0.2, 0.8, 0.25);
  const double inner = increment_c1(r, 1, 1, 0.9, Weighting::IpwOracle);
  EXPECT_NEAR(increment_c2(r, 1, 1, subgroup_known(), 0.9, 2.0, Weighting::IpwOracle), 2.0 * inner, 1e-15);
  EXPECT_NEAR(2.0 * inner, -6.2, 1e-12);
  r.x[0] = 5.0;
  EXPECT_EQ(increment_c2(r, 1, 1, subgroup_known(), 0.9, 2.0, Weighting::IpwOracle), 0.0);
  EXPECT_EQ(increment_c2(r, 1, 1, subgroup_all(), 0.9, 1.0, Weighting::IpwOracle),
            increment_c1(r, 1, 1, 0.9, Weighting::IpwOracle));
}

TEST(IncrementC3, HandComputedValues) {
  const auto all = subgroup_all();
  EXPECT_NEAR(increment_c3(record(0, 1, 0.8, 0.1, 0.5), all, 0.02, 1.0), -0.22, 1e-15);
  EXPECT_NEAR(increment_c3(record(0, 0, 0.8, 0.1, 0.5), all, 0.02, 1.0), 0.78, 1e-15);
  EXPECT_NEAR(increment_c3(record(1, 0, 0.8, 0.3, 0.5), all, 0.02, 1.0), -0.32, 1e-15);
  auto outside = record(0, 0, 0.8, 0.1, 0.5);
  outside.x[1] = 9.0;
  EXPECT_EQ(increment_c3(outside, subgroup_known(), 0.02, 1.0), 0.0);
}

TEST(IncrementC3, CellsSplitByObservedArm) {
  MonitorSpec spec;
  spec.id = "3O";
  spec.criterion = Criterion::C3;
  spec.weighting = Weighting::None;
  spec.subgroups = {subgroup_all(), subgroup_known()};
  ASSERT_EQ(spec.cell_count(), 4u);
  EXPECT_EQ(spec.cell_label(0), "all_a0");
  EXPECT_EQ(spec.cell_label(3), "known_a1");
  const auto r = record(1, 0, 0.2, 0.8, 0.5);
  const double full = increment_c3(r, subgroup_all(), 0.02, 1.0);
  EXPECT_EQ(monitor_increment(spec, 0, r, 0), 0.0);
  EXPECT_EQ(monitor_increment(spec, 1, r, 0), full);
  EXPECT_EQ(monitor_increment(spec, 3, r, 0), full);
  EXPECT_FALSE(cell_eligible(spec, 2, r));
  EXPECT_TRUE(cell_eligible(spec, 3, r));
  for (std::size_t i = 0; i < spec.cell_count(); ++i) EXPECT_EQ(spec.cell_index(spec.cell(i)), i);
}

TEST(Cusum, HandExample) {
  CusumState state(1);
  std::vector<double> m;
  for (double s : {1.0, -2.0, 3.0}) {
    const double v = cusum_update(state, std::vector<double>{s});
    m.push_back(state.accumulators()[0]);
    (void)v;
  }
  EXPECT_EQ(m, (std::vector<double>{1.0, -1.0, 3.0}));
  const std::vector<double> sums = {1.0, -2.0, 3.0};
  EXPECT_EQ(oracle::brute_force_cusum(sums).back(), 3.0);
  EXPECT_EQ(state.value(), 3.0);
}

TEST(Cusum, ZeroIncrementsStayZeroAndMaxOverCells) {
  CusumState zeros(3);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(cusum_update(zeros, std::vector<double>{0.0, 0.0, 0.0}), 0.0);
  CusumState two(2);
  EXPECT_EQ(cusum_update(two, std::vector<double>{5.0, 7.0}), 7.0);
  EXPECT_THROW(cusum_update(two, std::vector<double>{1.0}), InputError);
}

TEST(CusumProperty, RecursionEqualsBruteForceExactly) {
  SplitMix64 rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng() % 64;
    std::vector<double> sums(len);
    // integer-valued sums keep every partial sum exact, so equality is exact
    for (auto& s : sums) s = static_cast<double>(static_cast<int>(rng() % 41) - 20);
    const auto expect = oracle::brute_force_cusum(sums);
    CusumState state(1);
    for (std::size_t t = 0; t < len; ++t) {
      ASSERT_EQ(cusum_update(state, std::span<const double>(&sums[t], 1)), expect[t]);
    }
  }
}

TEST(Weights, ReciprocalOfSampleSd) {
  const std::vector<double> sd_half = {0.5, -0.5, 0.5, -0.5};
  // sample SD with n - 1: sqrt(4 * 0.25 / 3)
  EXPECT_NEAR(weight_from_increments(sd_half), 1.0 / std::sqrt(1.0 / 3.0), 1e-12);
  const std::vector<double> constant(10, 0.3);
  EXPECT_EQ(weight_from_increments(constant), 1e6);
}

TEST(Weights, WeightedCellsHaveUnitSd) {
  SplitMix64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c1(5000), c2(5000);
  for (auto& v : c1) v = 0.5 * g(rng);
  for (auto& v : c2) v = 0.25 * g(rng);
  for (auto* cell : {&c1, &c2}) {
    const double w = weight_from_increments(*cell);
    std::vector<double> scaled(cell->size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = w * (*cell)[i];
    EXPECT_NEAR(weight_from_increments(scaled), 1.0, 1e-12);
  }
}

TEST(Weights, EmptyCellIsReported) {
  MonitorSpec spec;
  spec.id = "2I";
  spec.criterion = Criterion::C2;
  spec.weighting = Weighting::IpwOracle;
  spec.subgroups = {subgroup_all(), subgroup_known()};
  spec.thresholds.assign(8, 0.7);
  // only treated records predicted positive: every other cell is empty
  std::vector<ObservationRecord> records(20, record(1, 1, 0.2, 0.9, 0.6));
  try {
    estimate_subgroup_weights(records, spec);
    FAIL() << "expected DegenerateCellError";
  } catch (const DegenerateCellError& e) {
    EXPECT_FALSE(e.cell().empty());
  }
}

TEST(Chart, TableMatchesDirectComputationBitForBit) {
  const auto records = stream(PropensityModel::interventional(), 4000, 77);
  for (auto weighting : {Weighting::Naive, Weighting::IpwOracle}) {
    const auto spec = c1_spec(weighting, {0.7, 0.72, 0.74, 0.76});
    const auto table = IncrementTable::build(spec, records);
    const auto direct = compute_chart(spec, records);
    EXPECT_EQ(table.chart(observed_outcomes(records)), direct.chart);
    EXPECT_EQ(table.batch_count(), 80u);
  }
  MonitorSpec c3;
  c3.id = "3I";
  c3.criterion = Criterion::C3;
  c3.weighting = Weighting::None;
  c3.subgroups = monitored_subgroups();
  c3.weights = {1.5, 2.5, 3.5, 4.5, 5.5, 6.5};
  EXPECT_EQ(IncrementTable::build(c3, records).chart(observed_outcomes(records)), compute_chart(c3, records).chart);
}

TEST(Chart, SubgroupChartWithAllAndUnitWeightEqualsCriterionOne) {
  const auto records = stream(PropensityModel::interventional(), 4000, 78);
  const auto c1 = c1_spec(Weighting::IpwOracle, {0.7, 0.72, 0.74, 0.76});
  MonitorSpec c2 = c1;
  c2.id = "test-c2";
  c2.criterion = Criterion::C2;
  c2.subgroups = {subgroup_all()};
  c2.weights = {1.0, 1.0, 1.0, 1.0};
  const auto t1 = compute_chart(c1, records);
  const auto t2 = compute_chart(c2, records);
  EXPECT_EQ(t1.chart, t2.chart);
  EXPECT_EQ(t1.cell_values, t2.cell_values);
}

TEST(Chart, TraceCsvHasOneColumnPerCell) {
  const auto records = stream(PropensityModel::interventional(), 200, 79);
  const auto spec = c1_spec(Weighting::IpwOracle);
  std::stringstream ss;
  write_chart_trace_csv(ss, spec, compute_chart(spec, records));
  std::string header, line;
  std::getline(ss, header);
  EXPECT_EQ(header, "batch_index,chart_value,a0_v0,a0_v1,a1_v0,a1_v1");
  std::size_t rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 4u);
}

// Property: on randomized streams the IPW increment mean matches the
// counterfactual increment mean, cell by cell.
TEST(IncrementProperty, IpwUnbiasedUnderRandomization) {
  const auto records = stream(PropensityModel::interventional(), 100000, 900);
  const double c = 0.75;
  for (int a = 0; a <= 1; ++a) {
    for (int v = 0; v <= 1; ++v) {
      std::vector<double> ipw, diff;
      for (const auto& r : records) {
        const double w = increment_c1(r, a, v, c, Weighting::IpwOracle);
        const double cf = binarize_risk(r.f_at(a), 0.5) == v ? c - (r.y_at(a) == v ? 1.0 : 0.0) : 0.0;
        ipw.push_back(w);
        diff.push_back(w - cf);
      }
      const auto d = oracle::mean_se(diff);
      EXPECT_LT(std::abs(d.mean), 3.0 * d.se) << "a=" << a << " v=" << v;
    }
  }
}

// The naive chart is biased against the causal target that the IPW chart
// estimates without bias (the counterfactual increment). Compared with the IPW
// sample mean instead, the PPV cells need far more than 1e5 records because
// their inverse weights reach 1/sigma(-6).
TEST(IncrementProperty, NaiveBiasDirectionUnderObservationalAssignment) {
  const auto records = stream(PropensityModel::observational(), 100000, 901);
  const double c = 0.75;
  for (int a = 0; a <= 1; ++a) {
    for (int v = 0; v <= 1; ++v) {
      std::vector<double> diff;
      for (const auto& r : records) {
        const double cf = binarize_risk(r.f_at(a), 0.5) == v ? c - (r.y_at(a) == v ? 1.0 : 0.0) : 0.0;
        diff.push_back(increment_c1(r, a, v, c, Weighting::Naive) - cf);
      }
      const auto d = oracle::mean_se(diff);
      if (v == 1) {
        EXPECT_GT(d.mean, 3.0 * d.se) << "PPV cell a=" << a;
      } else {
        EXPECT_LT(d.mean, -3.0 * d.se) << "NPV cell a=" << a;
      }
    }
  }
}

TEST(IncrementProperty, CriterionThreeDriftNonpositiveUnderWorstCaseNull) {
  const auto records =
      stream(PropensityModel::observational(), 100000, 902, OutcomeBaseline::WorstCaseNull);
  for (const auto& s : monitored_subgroups()) {
    std::vector<double> inc;
    for (const auto& r : records) inc.push_back(increment_c3(r, s, 0.02, 1.0));
    const auto m = oracle::mean_se(inc);
    EXPECT_LE(m.mean, 3.0 * m.se) << s.name;
  }
}
