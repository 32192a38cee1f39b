#pragma once

// CUSUM chart statistics for the seven monitoring options:
//   1N  naive observed PPV/NPV            (criterion 1, no adjustment)
//   1I  IPW PPV/NPV, known randomisation   (criterion 1)
//   1O  IPW PPV/NPV, observational         (criterion 1)
//   2I/2O subgroup PPV/NPV with IPW        (criterion 2)
//   3I/3O over-confidence residuals        (criterion 3, no inverse weights)
//
// Each monitor owns a set of cells: (a, v) for C1, (a, v, k) for C2 and
// (k, a) for C3, where a is the observed treatment.
// Every cell runs its own batch CUSUM recursion and the chart value is the
// maximum over cells.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalmon/propensity.hpp"
#include "causalmon/simulator.hpp"

namespace causalmon {

enum class Criterion { C1, C2, C3 };
enum class Weighting { Naive, IpwOracle, IpwEstimated, None };

std::string to_string(Weighting weighting);

struct MonitorCell {
  int a = -1;
  int upsilon = -1;  // -1 for C3
  std::size_t subgroup = 0;
};

struct MonitorSpec {
  std::string id;
  Criterion criterion = Criterion::C1;
  Weighting weighting = Weighting::Naive;
  std::vector<double> thresholds;  // per cell; unused by C3
  std::vector<double> weights;     // per cell; empty means all ones
  double delta = 0.02;
  std::vector<Subgroup> subgroups;  // C2/C3
  std::size_t batch_size = 50;
  double binarize_threshold = 0.5;
  std::optional<PropensityModel> estimated_propensity;  // IpwEstimated only
  /// When set, inverse weights are capped at 1/epsilon instead of raising a
  /// PositivityError for propensities outside (0, 1).
  std::optional<double> weight_clip_epsilon;

  std::size_t cell_count() const;
  MonitorCell cell(std::size_t index) const;
  std::size_t cell_index(const MonitorCell& cell) const;
  std::string cell_label(std::size_t index) const;
  double weight(std::size_t index) const { return weights.empty() ? 1.0 : weights[index]; }
  void validate() const;
};

struct IncrementContext {
  double binarize_threshold = 0.5;
  const PropensityModel* estimated = nullptr;  // IpwEstimated only
  std::optional<double> weight_clip_epsilon;
};

/// Criterion-1 summand at the record's observed outcome.
///   naive: (c - 1{Y=v}) 1{yhat(x, A)=v, A=a}
///   ipw:   (c - 1{Y=v, A=a} / p(A | .)) 1{yhat(x, a)=v}
double increment_c1(const ObservationRecord& record, int a, int upsilon, double threshold, Weighting weighting,
                    const IncrementContext& context = {});

/// w * [criterion-1 summand restricted to x in S_k].
double increment_c2(const ObservationRecord& record, int a, int upsilon, const Subgroup& subgroup,
                    double threshold, double weight, Weighting weighting, const IncrementContext& context = {});

/// w * [s(x, A) (f(x, A) - Y) - delta] 1{x in S_k}, at the observed treatment.
/// The C3 chart sums this over records with A = a, one cell per (k, a).
double increment_c3(const ObservationRecord& record, const Subgroup& subgroup, double delta, double weight);

/// Per-cell value of a monitor's summand for a record, with the outcome
/// overridden by `y`. Weights from the spec are applied.
double monitor_increment(const MonitorSpec& spec, std::size_t cell, const ObservationRecord& record, int y);

/// Whether the record's indicator gate is open for the cell (the summand can
/// be nonzero).
bool cell_eligible(const MonitorSpec& spec, std::size_t cell, const ObservationRecord& record);

/// Batch CUSUM: per cell M <- batch_sum + max(0, M_prev); chart = max over cells.
class CusumState {
 public:
  explicit CusumState(std::size_t cells);

  double update(std::span<const double> batch_sums);

  double value() const noexcept { return value_; }
  std::size_t batches() const noexcept { return batches_; }
  std::span<const double> accumulators() const noexcept { return accumulators_; }

 private:
  std::vector<double> accumulators_;
  double value_ = 0.0;
  std::size_t batches_ = 0;
};

double cusum_update(CusumState& state, std::span<const double> batch_sums);

struct ChartTrace {
  std::vector<double> chart;                   // per batch
  std::vector<std::vector<double>> cell_values;  // [batch][cell]
};

/// The increments of one monitor over one stream, stored for both possible
/// outcomes of every record. Each increment is affine in Y, so this table lets
/// a monitor be re-evaluated under resampled outcomes without touching the
/// records again.
class IncrementTable {
 public:
  static IncrementTable build(const MonitorSpec& spec, std::span<const ObservationRecord> records);

  std::size_t record_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t cell_count() const noexcept { return cells_; }
  std::size_t batch_size() const noexcept { return batch_size_; }
  std::size_t batch_count() const noexcept;

  /// Chart values per batch for the given outcomes (one per record, 0/1).
  std::vector<double> chart(std::span<const std::uint8_t> outcomes) const;
  void chart_into(std::span<const std::uint8_t> outcomes, std::span<double> out,
                  std::vector<double>& scratch_sums, CusumState& scratch_state) const;
  ChartTrace trace(std::span<const std::uint8_t> outcomes) const;

 private:
  struct Entry {
    std::uint32_t cell;
    double if_zero;
    double if_one;
  };
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
  std::size_t cells_ = 0;
  std::size_t batch_size_ = 50;
};

std::vector<std::uint8_t> observed_outcomes(std::span<const ObservationRecord> records);

/// Chart values straight from the per-record increments (no table).
ChartTrace compute_chart(const MonitorSpec& spec, std::span<const ObservationRecord> records);

/// 1 / sd, with sd below 1e-6 mapped to the 1e6 cap.
double weight_from_increments(std::span<const double> increments);

/// Inverse pre-change standard deviation of each cell's unweighted summand.
std::vector<double> estimate_subgroup_weights(std::span<const ObservationRecord> pre_change,
                                              const MonitorSpec& spec);

void write_chart_trace_csv(std::ostream& out, const MonitorSpec& spec, const ChartTrace& trace);

}  // namespace causalmon
