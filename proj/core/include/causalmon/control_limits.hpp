#pragma once

// Dynamic control limits. Outcomes are resampled under the least favourable
// over-confidence null, every monitor's chart is recomputed on each bootstrap
// path, and the limit at each batch is the order statistic of the surviving
// paths that keeps cumulative crossings within the alpha-spending budget.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "causalmon/monitors.hpp"
#include "causalmon/rng.hpp"
#include "causalmon/simulator.hpp"

namespace causalmon {

/// SignAdjusted: P* = f - s * delta (mean-zero criterion-3 summand for both
/// signs). Literal: P* = f + delta for every record.
enum class WorstCaseNull { SignAdjusted, Literal };

double worst_case_probability(double f_observed, int sign, double delta,
                              WorstCaseNull variant = WorstCaseNull::SignAdjusted);

template <class Urbg>
int bootstrap_outcome(double f_observed, int sign, double delta, Urbg& rng,
                      WorstCaseNull variant = WorstCaseNull::SignAdjusted) {
  return bernoulli(rng, worst_case_probability(f_observed, sign, delta, variant));
}

/// Uniform spending: alpha * t / T.
double alpha_spending(double alpha, double t, double horizon);

/// Cumulative budget at the end of each batch.
std::vector<double> uniform_spending_schedule(double alpha, std::size_t batch_count, std::size_t batch_size,
                                              std::int64_t horizon);

/// Chart values of B paths over a common batch grid, row-major by path.
struct PathSet {
  std::size_t paths = 0;
  std::size_t batches = 0;
  std::vector<double> values;

  PathSet() = default;
  PathSet(std::size_t path_count, std::size_t batch_count)
      : paths(path_count), batches(batch_count), values(path_count * batch_count, 0.0) {}

  double at(std::size_t path, std::size_t batch) const { return values[path * batches + batch]; }
  std::span<double> row(std::size_t path) { return {values.data() + path * batches, batches}; }
  std::span<const double> row(std::size_t path) const { return {values.data() + path * batches, batches}; }
};

struct ControlLimitSchedule {
  std::vector<double> h;                 // per batch
  std::vector<double> cumulative_spend;  // per batch
  std::vector<std::size_t> surviving;    // paths not yet crossed before the batch
  std::vector<std::size_t> crossed;      // cumulative crossings after the batch
  std::size_t paths = 0;
  double alpha = 0.0;
};

/// Sequential order-statistic construction. Crossing is strict (value > h);
/// paths that cross are frozen and never re-enter later quantiles.
ControlLimitSchedule compute_dcl(const PathSet& paths, std::span<const double> cumulative_spend, double alpha);

/// 1-based index of the first batch with chart > h, if any.
std::optional<std::size_t> alarm_check(std::span<const double> chart, const ControlLimitSchedule& schedule);

/// First crossing batch (1-based) of every path against a schedule.
std::vector<std::optional<std::size_t>> crossing_batches(const PathSet& paths, const ControlLimitSchedule& schedule);

struct BootstrapConfig {
  std::size_t paths = 500;
  double delta = 0.02;
  WorstCaseNull variant = WorstCaseNull::SignAdjusted;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Draws outcome vectors Y* for the records, conditioning on their covariates,
/// treatments and predictions. Path p uses its own keyed generator, so paths
/// are reproducible in isolation.
std::vector<std::uint8_t> bootstrap_outcomes(std::span<const ObservationRecord> records, const BootstrapConfig& config,
                                             std::size_t path);

/// Chart paths for every table, all evaluated on the same bootstrap draws.
std::vector<PathSet> bootstrap_paths(std::span<const ObservationRecord> records,
                                     std::span<const IncrementTable* const> tables, const BootstrapConfig& config);

void write_schedule_csv(std::ostream& out, const ControlLimitSchedule& schedule);

}  // namespace causalmon
