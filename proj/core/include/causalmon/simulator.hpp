#pragma once

// Counterfactual patient streams. Each record carries both potential outcomes
// so that oracle quantities (standalone PPV/NPV, counterfactual increments)
// can be evaluated next to what a monitor would actually observe.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "causalmon/propensity.hpp"
#include "causalmon/risk_model.hpp"
#include "causalmon/rng.hpp"

namespace causalmon {

struct ObservationRecord {
  std::int64_t t = 1;
  std::vector<double> x;
  std::vector<double> z;
  int a = 0;
  int y_obs = 0;
  int y0 = 0;
  int y1 = 0;
  double f0 = 0.5;
  double f1 = 0.5;
  double propensity_used = 0.5;  // P(A = 1 | inputs)

  double f_at(int arm) const noexcept { return arm == 1 ? f1 : f0; }
  int y_at(int arm) const noexcept { return arm == 1 ? y1 : y0; }
  /// Probability of the treatment actually received.
  double propensity_of_observed() const noexcept { return a == 1 ? propensity_used : 1.0 - propensity_used; }

  friend bool operator==(const ObservationRecord&, const ObservationRecord&) = default;
};

/// One coordinate bound; endpoints are open unless flagged closed.
struct Interval {
  std::size_t coordinate = 0;  // 0-based
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_closed = false;
  bool upper_closed = false;

  bool contains(double v) const noexcept {
    const bool lo = lower_closed ? v >= lower : v > lower;
    const bool hi = upper_closed ? v <= upper : v < upper;
    return lo && hi;
  }
};

/// Box-shaped subgroup, optionally complemented (S_1 \ S_2 style sets).
struct Subgroup {
  std::string name;
  std::vector<Interval> box;
  bool complement = false;

  bool contains(std::span<const double> x) const;
};

bool subgroup_contains(const Subgroup& s, std::span<const double> x);

Subgroup subgroup_all();
/// x1 in (-1, 2) and |x2| < 2.5; prevalence about 42%.
Subgroup subgroup_known();
/// |x1| < 1.5 and |x2| < 1.5; prevalence about 30%.
Subgroup subgroup_misspecified();
/// Everything outside subgroup_known().
Subgroup subgroup_known_complement();
/// Looks up "all", "known", "misspec", "known_complement".
Subgroup subgroup_by_name(const std::string& name);
/// The monitored families S_1 = all, S_2 = known, S_3 = S_1 \ S_2.
std::vector<Subgroup> monitored_subgroups();

enum class ShiftShape { Sudden, Gradual };

struct ShiftScenario {
  int shifted_arm = 1;
  Subgroup shifted_subgroup = subgroup_all();
  double magnitude = 0.1;
  ShiftShape shape = ShiftShape::Sudden;
  std::int64_t change_time = 500;
  double ramp_length = 2000.0;

  void validate() const;
  /// c for sudden shifts; c * min(1, (t - t0) / ramp) for gradual ones.
  double effective_magnitude(std::int64_t t) const;
};

/// Pre-change outcome law: the simulator's logistic truth.
double true_risk_pre(std::span<const double> x, int a);

/// Moves p0 toward 0.5 by the effective magnitude inside the shifted cell.
double apply_shift(double p0, std::span<const double> x, int a, const ShiftScenario& scenario,
                   std::int64_t t);

template <class Urbg>
std::vector<double> sample_covariates(Urbg& rng, std::size_t dimension = kCovariateDimension) {
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> x(dimension);
  for (auto& v : x) v = normal(rng);
  return x;
}

/// Outcome law before any shift is applied.
///  - Oracle: true_risk_pre.
///  - WorstCaseNull: the least-favourable over-confidence null,
///    clamp(f(x,a) - sign(x,a) * delta, 0, 1), evaluated on the locked model.
enum class OutcomeBaseline { Oracle, WorstCaseNull };

struct StreamSettings {
  std::int64_t horizon = 4000;
  std::optional<ShiftScenario> shift;
  OutcomeBaseline baseline = OutcomeBaseline::Oracle;
  double delta = 0.02;
  std::size_t dimension = kCovariateDimension;
};

/// Independent keys for each source of randomness in a stream.
struct StreamSeeds {
  std::uint64_t covariates = 1;
  std::uint64_t treatment = 2;
  std::uint64_t outcomes = 3;
};

/// Covariates, predictions and treatments only (outcomes left at 0). Nothing
/// here depends on the outcome law, so all scenarios that share seeds share
/// this part of the stream.
std::vector<ObservationRecord> generate_assignments(std::int64_t horizon, const RiskModel& model,
                                                    const PropensityModel& propensity,
                                                    const StreamSeeds& seeds,
                                                    std::size_t dimension = kCovariateDimension);

/// Success probability of Y(a) for a record under the given settings.
double outcome_probability(const ObservationRecord& record, int a, const StreamSettings& settings);

/// Fills y0, y1 and y_obs in place from the keyed outcome draws.
void draw_outcomes(std::span<ObservationRecord> records, const StreamSettings& settings,
                   std::uint64_t outcome_seed);

std::vector<ObservationRecord> generate_stream(const StreamSettings& settings, const RiskModel& model,
                                               const PropensityModel& propensity, const StreamSeeds& seeds);

struct PropensityRange {
  double min = 1.0;
  double max = 0.0;
};
PropensityRange propensity_range(std::span<const ObservationRecord> records);

/// CSV with header t,x1..xd,a,y_obs,y0,y1,f0,f1,propensity_used.
void write_stream_csv(std::ostream& out, std::span<const ObservationRecord> records);
std::vector<ObservationRecord> read_stream_csv(std::istream& in);

}  // namespace causalmon
