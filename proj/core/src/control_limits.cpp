#include "causalmon/control_limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"
#include "causalmon/parallel.hpp"

namespace causalmon {

double worst_case_probability(double f_observed, int sign, double delta, WorstCaseNull variant) {
  const double p = variant == WorstCaseNull::SignAdjusted ? f_observed - sign * delta : f_observed + delta;
  return std::clamp(p, 0.0, 1.0);
}

double alpha_spending(double alpha, double t, double horizon) {
  if (!(horizon > 0.0)) throw InputError("alpha_spending: horizon must be positive");
  return alpha * std::clamp(t, 0.0, horizon) / horizon;
}

std::vector<double> uniform_spending_schedule(double alpha, std::size_t batch_count, std::size_t batch_size,
                                              std::int64_t horizon) {
  std::vector<double> spend(batch_count);
  for (std::size_t b = 0; b < batch_count; ++b) {
    const double t_end = static_cast<double>((b + 1) * batch_size);
    spend[b] = alpha_spending(alpha, t_end, static_cast<double>(horizon));
  }
  return spend;
}

ControlLimitSchedule compute_dcl(const PathSet& paths, std::span<const double> cumulative_spend, double alpha) {
  if (paths.paths == 0) throw InputError("compute_dcl: no bootstrap paths");
  if (cumulative_spend.size() != paths.batches) throw InputError("compute_dcl: spending and path grids differ");

  ControlLimitSchedule schedule;
  schedule.paths = paths.paths;
  schedule.alpha = alpha;
  schedule.cumulative_spend.assign(cumulative_spend.begin(), cumulative_spend.end());
  schedule.h.resize(paths.batches);
  schedule.surviving.resize(paths.batches);
  schedule.crossed.resize(paths.batches);

  std::vector<bool> frozen(paths.paths, false);
  std::size_t crossed = 0;
  std::vector<double> values;
  values.reserve(paths.paths);
  double previous_spend = 0.0;
  for (std::size_t b = 0; b < paths.batches; ++b) {
    if (cumulative_spend[b] < previous_spend) throw InputError("compute_dcl: spending must be nondecreasing");
    previous_spend = cumulative_spend[b];
    // The small offset keeps products such as 0.1 * 500 from flooring to 49.
    const auto budget = static_cast<std::size_t>(std::floor(cumulative_spend[b] * paths.paths + 1e-9));
    const std::size_t allowed = budget > crossed ? budget - crossed : 0;

    values.clear();
    for (std::size_t p = 0; p < paths.paths; ++p) {
      if (!frozen[p]) values.push_back(paths.at(p, b));
    }
    schedule.surviving[b] = values.size();
    if (allowed >= values.size()) {
      throw ScheduleSaturatedError("compute_dcl: budget of " + std::to_string(budget) + " crossings at batch " +
                                   std::to_string(b + 1) + " exceeds the surviving paths");
    }
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(allowed), values.end(),
                     std::greater<double>());
    const double h = values[allowed];
    schedule.h[b] = h;
    for (std::size_t p = 0; p < paths.paths; ++p) {
      if (!frozen[p] && paths.at(p, b) > h) {
        frozen[p] = true;
        ++crossed;
      }
    }
    schedule.crossed[b] = crossed;
  }
  return schedule;
}

std::optional<std::size_t> alarm_check(std::span<const double> chart, const ControlLimitSchedule& schedule) {
  if (chart.size() != schedule.h.size()) {
    throw InputError("alarm_check: chart has " + std::to_string(chart.size()) + " batches, schedule has " +
                     std::to_string(schedule.h.size()));
  }
  for (std::size_t b = 0; b < chart.size(); ++b) {
    if (chart[b] > schedule.h[b]) return b + 1;
  }
  return std::nullopt;
}

std::vector<std::optional<std::size_t>> crossing_batches(const PathSet& paths, const ControlLimitSchedule& schedule) {
  std::vector<std::optional<std::size_t>> out(paths.paths);
  for (std::size_t p = 0; p < paths.paths; ++p) out[p] = alarm_check(paths.row(p), schedule);
  return out;
}

std::vector<std::uint8_t> bootstrap_outcomes(std::span<const ObservationRecord> records, const BootstrapConfig& config,
                                             std::size_t path) {
  SplitMix64 rng(config.seed, path, purpose::kBootstrap);
  std::vector<std::uint8_t> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double f = records[i].f_at(records[i].a);
    y[i] = static_cast<std::uint8_t>(bootstrap_outcome(f, sign_of_risk(f), config.delta, rng, config.variant));
  }
  return y;
}

std::vector<PathSet> bootstrap_paths(std::span<const ObservationRecord> records,
                                     std::span<const IncrementTable* const> tables, const BootstrapConfig& config) {
  if (config.paths == 0) throw InputError("bootstrap_paths: need at least one path");
  std::vector<PathSet> out;
  out.reserve(tables.size());
  for (const auto* table : tables) {
    if (table->record_count() != records.size()) throw InputError("bootstrap_paths: table/stream length mismatch");
    out.emplace_back(config.paths, table->batch_count());
  }

  parallel_for(config.paths, config.workers, [&](std::size_t p) {
    const auto y = bootstrap_outcomes(records, config, p);
    std::vector<double> sums;
    for (std::size_t k = 0; k < tables.size(); ++k) {
      CusumState state(tables[k]->cell_count());
      tables[k]->chart_into(y, out[k].row(p), sums, state);
    }
  });
  return out;
}

void write_schedule_csv(std::ostream& out, const ControlLimitSchedule& schedule) {
  out << "batch_index,h,cumulative_spend,surviving_paths\n";
  for (std::size_t b = 0; b < schedule.h.size(); ++b) {
    out << (b + 1) << ',' << format_double(schedule.h[b]) << ',' << format_double(schedule.cumulative_spend[b]) << ','
        << schedule.surviving[b] << '\n';
  }
}

}  // namespace causalmon
