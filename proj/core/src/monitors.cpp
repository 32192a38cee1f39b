#include "causalmon/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"

namespace causalmon {

namespace {

constexpr double kSdFloor = 1e-6;
constexpr double kWeightCap = 1e6;

double inverse_observed_propensity(const ObservationRecord& r, Weighting weighting, const IncrementContext& ctx) {
  double p_treated = r.propensity_used;
  if (weighting == Weighting::IpwEstimated) {
    if (ctx.estimated == nullptr) throw InputError("ipw-estimated weighting without an estimated propensity model");
    p_treated = ctx.estimated->score(r.f0, r.f1);
  }
  const double p_observed = r.a == 1 ? p_treated : 1.0 - p_treated;
  if (!(p_observed > 0.0 && p_observed < 1.0)) {
    if (ctx.weight_clip_epsilon) return 1.0 / std::max(p_observed, *ctx.weight_clip_epsilon);
    throw PositivityError("positivity violated at t=" + std::to_string(r.t) +
                          ": propensity of observed treatment is " + format_double(p_observed));
  }
  const double w = 1.0 / p_observed;
  if (ctx.weight_clip_epsilon) return std::min(w, 1.0 / *ctx.weight_clip_epsilon);
  return w;
}

bool c1_gate(const ObservationRecord& r, int a, int upsilon, Weighting weighting, double b) {
  if (weighting == Weighting::Naive) return r.a == a && binarize_risk(r.f_at(r.a), b) == upsilon;
  return binarize_risk(r.f_at(a), b) == upsilon;
}

double c1_value(const ObservationRecord& r, int y, int a, int upsilon, double threshold, Weighting weighting,
                const IncrementContext& ctx) {
  if (weighting == Weighting::None) throw InputError("criterion 1/2 monitors need a weighting scheme");
  if (!c1_gate(r, a, upsilon, weighting, ctx.binarize_threshold)) return 0.0;
  if (weighting == Weighting::Naive) return threshold - (y == upsilon ? 1.0 : 0.0);
  const double hit = (y == upsilon && r.a == a) ? inverse_observed_propensity(r, weighting, ctx) : 0.0;
  return threshold - hit;
}

double c3_value(const ObservationRecord& r, int y, const Subgroup& s, double delta, double weight) {
  if (!s.contains(r.x)) return 0.0;
  const double f = r.f_at(r.a);
  return weight * (sign_of_risk(f) * (f - y) - delta);
}

IncrementContext context_of(const MonitorSpec& spec) {
  IncrementContext ctx;
  ctx.binarize_threshold = spec.binarize_threshold;
  ctx.estimated = spec.estimated_propensity ? &*spec.estimated_propensity : nullptr;
  ctx.weight_clip_epsilon = spec.weight_clip_epsilon;
  return ctx;
}

void check_arm(int a, int upsilon) {
  if ((a != 0 && a != 1) || (upsilon != 0 && upsilon != 1)) throw InputError("cell (a, v) must be binary");
}

}  // namespace

std::string to_string(Weighting weighting) {
  switch (weighting) {
    case Weighting::Naive: return "naive";
    case Weighting::IpwOracle: return "ipw-oracle";
    case Weighting::IpwEstimated: return "ipw-estimated";
    case Weighting::None: return "none";
  }
  return "unknown";
}

double increment_c1(const ObservationRecord& record, int a, int upsilon, double threshold, Weighting weighting,
                    const IncrementContext& context) {
  check_arm(a, upsilon);
  return c1_value(record, record.y_obs, a, upsilon, threshold, weighting, context);
}

double increment_c2(const ObservationRecord& record, int a, int upsilon, const Subgroup& subgroup, double threshold,
                    double weight, Weighting weighting, const IncrementContext& context) {
  check_arm(a, upsilon);
  if (!subgroup.contains(record.x)) return 0.0;
  return weight * c1_value(record, record.y_obs, a, upsilon, threshold, weighting, context);
}

double increment_c3(const ObservationRecord& record, const Subgroup& subgroup, double delta, double weight) {
  return c3_value(record, record.y_obs, subgroup, delta, weight);
}

std::size_t MonitorSpec::cell_count() const {
  switch (criterion) {
    case Criterion::C1: return 4;
    case Criterion::C2: return 4 * subgroups.size();
    case Criterion::C3: return 2 * subgroups.size();
  }
  return 0;
}

MonitorCell MonitorSpec::cell(std::size_t index) const {
  if (index >= cell_count()) throw InputError("cell index out of range");
  switch (criterion) {
    case Criterion::C1: return {static_cast<int>(index / 2), static_cast<int>(index % 2), 0};
    case Criterion::C2: {
      const std::size_t local = index % 4;
      return {static_cast<int>(local / 2), static_cast<int>(local % 2), index / 4};
    }
    case Criterion::C3: return {static_cast<int>(index % 2), -1, index / 2};
  }
  return {};
}

std::size_t MonitorSpec::cell_index(const MonitorCell& c) const {
  switch (criterion) {
    case Criterion::C1: return static_cast<std::size_t>(2 * c.a + c.upsilon);
    case Criterion::C2: return 4 * c.subgroup + static_cast<std::size_t>(2 * c.a + c.upsilon);
    case Criterion::C3: return 2 * c.subgroup + static_cast<std::size_t>(c.a);
  }
  return 0;
}

std::string MonitorSpec::cell_label(std::size_t index) const {
  const MonitorCell c = cell(index);
  switch (criterion) {
    case Criterion::C1: return "a" + std::to_string(c.a) + "_v" + std::to_string(c.upsilon);
    case Criterion::C2:
      return "a" + std::to_string(c.a) + "_v" + std::to_string(c.upsilon) + "_" + subgroups[c.subgroup].name;
    case Criterion::C3: return subgroups[c.subgroup].name + "_a" + std::to_string(c.a);
  }
  return {};
}

void MonitorSpec::validate() const {
  if (batch_size == 0) throw InputError(id + ": batch size must be positive");
  if (criterion != Criterion::C1 && subgroups.empty()) throw InputError(id + ": subgroups required");
  const std::size_t cells = cell_count();
  if (criterion != Criterion::C3 && thresholds.size() != cells) {
    throw InputError(id + ": expected " + std::to_string(cells) + " thresholds");
  }
  if (criterion != Criterion::C3 && weighting == Weighting::None) {
    throw InputError(id + ": criterion 1/2 monitors need a weighting scheme");
  }
  if (!weights.empty()) {
    if (weights.size() != cells) throw InputError(id + ": expected " + std::to_string(cells) + " weights");
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InputError(id + ": weights must be positive and finite");
    }
  }
  if (delta < 0.0) throw InputError(id + ": delta must be nonnegative");
  if (weighting == Weighting::IpwEstimated && !estimated_propensity) {
    throw InputError(id + ": ipw-estimated weighting needs an estimated propensity model");
  }
}

double monitor_increment(const MonitorSpec& spec, std::size_t cell, const ObservationRecord& record, int y) {
  const MonitorCell c = spec.cell(cell);
  const IncrementContext ctx = context_of(spec);
  switch (spec.criterion) {
    case Criterion::C1: {
      const double v = c1_value(record, y, c.a, c.upsilon, spec.thresholds[cell], spec.weighting, ctx);
      return spec.weights.empty() ? v : spec.weights[cell] * v;
    }
    case Criterion::C2: {
      if (!spec.subgroups[c.subgroup].contains(record.x)) return 0.0;
      return spec.weight(cell) * c1_value(record, y, c.a, c.upsilon, spec.thresholds[cell], spec.weighting, ctx);
    }
    case Criterion::C3:
      if (record.a != c.a) return 0.0;
      return c3_value(record, y, spec.subgroups[c.subgroup], spec.delta, spec.weight(cell));
  }
  return 0.0;
}

bool cell_eligible(const MonitorSpec& spec, std::size_t cell, const ObservationRecord& record) {
  const MonitorCell c = spec.cell(cell);
  switch (spec.criterion) {
    case Criterion::C1: return c1_gate(record, c.a, c.upsilon, spec.weighting, spec.binarize_threshold);
    case Criterion::C2:
      return spec.subgroups[c.subgroup].contains(record.x) &&
             c1_gate(record, c.a, c.upsilon, spec.weighting, spec.binarize_threshold);
    case Criterion::C3: return record.a == c.a && spec.subgroups[c.subgroup].contains(record.x);
  }
  return false;
}

CusumState::CusumState(std::size_t cells) : accumulators_(cells, 0.0) {
  if (cells == 0) throw InputError("CusumState: at least one cell required");
}

double CusumState::update(std::span<const double> batch_sums) {
  if (batch_sums.size() != accumulators_.size()) throw InputError("cusum_update: one batch sum per cell required");
  double chart = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < accumulators_.size(); ++c) {
    accumulators_[c] = batch_sums[c] + std::max(0.0, accumulators_[c]);
    chart = std::max(chart, accumulators_[c]);
  }
  value_ = chart;
  ++batches_;
  return chart;
}

double cusum_update(CusumState& state, std::span<const double> batch_sums) { return state.update(batch_sums); }

IncrementTable IncrementTable::build(const MonitorSpec& spec, std::span<const ObservationRecord> records) {
  spec.validate();
  IncrementTable table;
  table.cells_ = spec.cell_count();
  table.batch_size_ = spec.batch_size;
  table.offsets_.reserve(records.size() + 1);
  table.offsets_.push_back(0);
  for (const auto& r : records) {
    for (std::size_t c = 0; c < table.cells_; ++c) {
      const double v0 = monitor_increment(spec, c, r, 0);
      const double v1 = monitor_increment(spec, c, r, 1);
      if (v0 != 0.0 || v1 != 0.0) table.entries_.push_back({static_cast<std::uint32_t>(c), v0, v1});
    }
    table.offsets_.push_back(table.entries_.size());
  }
  return table;
}

std::size_t IncrementTable::batch_count() const noexcept {
  return (record_count() + batch_size_ - 1) / batch_size_;
}

void IncrementTable::chart_into(std::span<const std::uint8_t> outcomes, std::span<double> out,
                                std::vector<double>& sums, CusumState& state) const {
  const std::size_t n = record_count();
  if (outcomes.size() != n) throw InputError("IncrementTable: one outcome per record required");
  if (out.size() != batch_count()) throw InputError("IncrementTable: output span has wrong length");
  sums.assign(cells_, 0.0);
  std::size_t batch = 0;
  for (std::size_t start = 0; start < n; start += batch_size_, ++batch) {
    std::fill(sums.begin(), sums.end(), 0.0);
    const std::size_t end = std::min(n, start + batch_size_);
    for (std::size_t i = start; i < end; ++i) {
      const bool one = outcomes[i] != 0;
      for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
        const Entry& entry = entries_[e];
        sums[entry.cell] += one ? entry.if_one : entry.if_zero;
      }
    }
    out[batch] = state.update(sums);
  }
}

std::vector<double> IncrementTable::chart(std::span<const std::uint8_t> outcomes) const {
  std::vector<double> out(batch_count());
  std::vector<double> sums;
  CusumState state(cells_);
  chart_into(outcomes, out, sums, state);
  return out;
}

ChartTrace IncrementTable::trace(std::span<const std::uint8_t> outcomes) const {
  const std::size_t n = record_count();
  if (outcomes.size() != n) throw InputError("IncrementTable: one outcome per record required");
  ChartTrace trace;
  CusumState state(cells_);
  std::vector<double> sums(cells_);
  for (std::size_t start = 0; start < n; start += batch_size_) {
    std::fill(sums.begin(), sums.end(), 0.0);
    const std::size_t end = std::min(n, start + batch_size_);
    for (std::size_t i = start; i < end; ++i) {
      for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
        sums[entries_[e].cell] += outcomes[i] ? entries_[e].if_one : entries_[e].if_zero;
      }
    }
    trace.chart.push_back(state.update(sums));
    trace.cell_values.emplace_back(state.accumulators().begin(), state.accumulators().end());
  }
  return trace;
}

std::vector<std::uint8_t> observed_outcomes(std::span<const ObservationRecord> records) {
  std::vector<std::uint8_t> y(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) y[i] = static_cast<std::uint8_t>(records[i].y_obs);
  return y;
}

ChartTrace compute_chart(const MonitorSpec& spec, std::span<const ObservationRecord> records) {
  spec.validate();
  const std::size_t cells = spec.cell_count();
  ChartTrace trace;
  CusumState state(cells);
  std::vector<double> sums(cells);
  for (std::size_t start = 0; start < records.size(); start += spec.batch_size) {
    std::fill(sums.begin(), sums.end(), 0.0);
    const std::size_t end = std::min(records.size(), start + spec.batch_size);
    for (std::size_t i = start; i < end; ++i) {
      for (std::size_t c = 0; c < cells; ++c) sums[c] += monitor_increment(spec, c, records[i], records[i].y_obs);
    }
    trace.chart.push_back(state.update(sums));
    trace.cell_values.emplace_back(state.accumulators().begin(), state.accumulators().end());
  }
  return trace;
}

double weight_from_increments(std::span<const double> increments) {
  if (increments.size() < 2) throw DegenerateCellError("need at least two increments for a standard deviation", "");
  double mean = 0.0;
  for (double v : increments) mean += v;
  mean /= static_cast<double>(increments.size());
  double ss = 0.0;
  for (double v : increments) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(increments.size() - 1));
  if (sd < kSdFloor) return kWeightCap;
  return 1.0 / sd;
}

std::vector<double> estimate_subgroup_weights(std::span<const ObservationRecord> pre_change, const MonitorSpec& spec) {
  MonitorSpec unweighted = spec;
  unweighted.weights.clear();
  unweighted.validate();
  const std::size_t cells = unweighted.cell_count();
  std::vector<double> weights(cells);
  std::vector<double> increments(pre_change.size());
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < pre_change.size(); ++i) {
      const auto& r = pre_change[i];
      increments[i] = monitor_increment(unweighted, c, r, r.y_obs);
      if (cell_eligible(unweighted, c, r)) ++eligible;
    }
    if (eligible < 2) {
      throw DegenerateCellError(spec.id + ": cell " + unweighted.cell_label(c) + " has " + std::to_string(eligible) +
                                    " eligible pre-change records",
                                unweighted.cell_label(c));
    }
    weights[c] = weight_from_increments(increments);
  }
  return weights;
}

void write_chart_trace_csv(std::ostream& out, const MonitorSpec& spec, const ChartTrace& trace) {
  out << "batch_index,chart_value";
  for (std::size_t c = 0; c < spec.cell_count(); ++c) out << ',' << spec.cell_label(c);
  out << '\n';
  for (std::size_t b = 0; b < trace.chart.size(); ++b) {
    out << (b + 1) << ',' << format_double(trace.chart[b]);
    for (double v : trace.cell_values[b]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace causalmon
