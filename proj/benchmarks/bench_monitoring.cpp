#include <benchmark/benchmark.h>

#include "causalmon/control_limits.hpp"
#include "causalmon/harness.hpp"
#include "causalmon/monitors.hpp"
#include "causalmon/simulator.hpp"

namespace cm = causalmon;

namespace {

std::vector<cm::ObservationRecord> make_stream(std::int64_t horizon) {
  cm::StreamSettings settings;
  settings.horizon = horizon;
  return cm::generate_stream(settings, cm::RiskModel::oracle(), cm::PropensityModel::interventional(), {1, 2, 3});
}

cm::MonitorSpec c2_spec() {
  cm::MonitorSpec spec;
  spec.id = "2I";
  spec.criterion = cm::Criterion::C2;
  spec.weighting = cm::Weighting::IpwOracle;
  spec.subgroups = cm::monitored_subgroups();
  spec.thresholds.assign(12, 0.75);
  return spec;
}

}  // namespace

static void BM_CusumUpdate(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  std::vector<double> sums(cells);
  for (std::size_t i = 0; i < cells; ++i) sums[i] = (i % 3 == 0 ? 0.5 : -0.25);
  cm::CusumState cusum(cells);
  for (auto _ : state) benchmark::DoNotOptimize(cusum.update(sums));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CusumUpdate)->Arg(1)->Arg(4)->Arg(12);

static void BM_GenerateStream(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(make_stream(state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateStream)->Arg(4000);

static void BM_IncrementTableBuild(benchmark::State& state) {
  const auto records = make_stream(4000);
  const auto spec = c2_spec();
  for (auto _ : state) benchmark::DoNotOptimize(cm::IncrementTable::build(spec, records));
}
BENCHMARK(BM_IncrementTableBuild);

static void BM_TableChart(benchmark::State& state) {
  const auto records = make_stream(4000);
  const auto table = cm::IncrementTable::build(c2_spec(), records);
  const auto y = cm::observed_outcomes(records);
  std::vector<double> out(table.batch_count()), scratch;
  cm::CusumState cusum(table.cell_count());
  for (auto _ : state) {
    table.chart_into(y, out, scratch, cusum);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_TableChart);

static void BM_BootstrapAndDcl(benchmark::State& state) {
  const auto records = make_stream(4000);
  const auto table = cm::IncrementTable::build(c2_spec(), records);
  const cm::IncrementTable* tables[] = {&table};
  cm::BootstrapConfig cfg;
  cfg.paths = static_cast<std::size_t>(state.range(0));
  cfg.seed = 9;
  const auto spend = cm::uniform_spending_schedule(0.1, table.batch_count(), 50, 4000);
  for (auto _ : state) {
    const auto paths = cm::bootstrap_paths(records, tables, cfg);
    benchmark::DoNotOptimize(cm::compute_dcl(paths[0], spend, 0.1));
  }
}
BENCHMARK(BM_BootstrapAndDcl)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Replicate(benchmark::State& state) {
  cm::ScenarioConfig cfg;
  cfg.setting = cm::Setting::Interventional;
  cfg.monitors = {"1N", "1I", "2I", "3I"};
  const auto plan = cm::prepare_plan(cfg);
  std::size_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cm::run_replicate(plan, cfg, r++));
}
BENCHMARK(BM_Replicate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
