#include "causalmon/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "causalmon/errors.hpp"

namespace causalmon {

bool Subgroup::contains(std::span<const double> x) const {
  bool inside = true;
  for (const auto& bound : box) {
    if (bound.coordinate >= x.size()) {
      throw InputError("subgroup '" + name + "' constrains coordinate " +
                       std::to_string(bound.coordinate + 1) + " of a " + std::to_string(x.size()) +
                       "-dimensional vector");
    }
    if (!bound.contains(x[bound.coordinate])) {
      inside = false;
      break;
    }
  }
  return inside != complement;
}

bool subgroup_contains(const Subgroup& s, std::span<const double> x) { return s.contains(x); }

Subgroup subgroup_all() { return Subgroup{"all", {}, false}; }

Subgroup subgroup_known() {
  return Subgroup{"known", {Interval{0, -1.0, 2.0}, Interval{1, -2.5, 2.5}}, false};
}

Subgroup subgroup_misspecified() {
  return Subgroup{"misspec", {Interval{0, -1.5, 1.5}, Interval{1, -1.5, 1.5}}, false};
}

Subgroup subgroup_known_complement() {
  Subgroup s = subgroup_known();
  s.name = "known_complement";
  s.complement = true;
  return s;
}

Subgroup subgroup_by_name(const std::string& name) {
  if (name == "all") return subgroup_all();
  if (name == "known") return subgroup_known();
  if (name == "misspec") return subgroup_misspecified();
  if (name == "known_complement") return subgroup_known_complement();
  throw InputError("unknown subgroup: " + name);
}

std::vector<Subgroup> monitored_subgroups() {
  return {subgroup_all(), subgroup_known(), subgroup_known_complement()};
}

void ShiftScenario::validate() const {
  if (shifted_arm != 0 && shifted_arm != 1) throw InputError("shift: arm must be 0 or 1");
  if (!(magnitude >= 0.0 && magnitude <= 0.5)) throw InputError("shift: magnitude must lie in [0, 0.5]");
  if (change_time < 1) throw InputError("shift: change time must be >= 1");
  if (shape == ShiftShape::Gradual && !(ramp_length > 0.0)) {
    throw InputError("shift: gradual ramp length must be positive");
  }
}

double ShiftScenario::effective_magnitude(std::int64_t t) const {
  if (t < change_time) return 0.0;
  if (shape == ShiftShape::Sudden) return magnitude;
  const double progress = static_cast<double>(t - change_time) / ramp_length;
  return magnitude * std::min(1.0, progress);
}

double true_risk_pre(std::span<const double> x, int a) {
  if (x.size() < 2) throw InputError("true_risk_pre: need at least two covariates");
  if (a != 0 && a != 1) throw InputError("true_risk_pre: treatment must be 0 or 1");
  const double x1 = x[0], x2 = x[1];
  return logistic(-0.5 * x1 - x2 + 0.5 * a + x1 * a + 2.0 * x2 * a);
}

double apply_shift(double p0, std::span<const double> x, int a, const ShiftScenario& scenario,
                   std::int64_t t) {
  if (t < scenario.change_time || a != scenario.shifted_arm || !scenario.shifted_subgroup.contains(x)) {
    return p0;
  }
  const double c = scenario.effective_magnitude(t);
  double p = p0;
  if (p0 > 0.5) {
    p = p0 - c;
  } else if (p0 < 0.5) {
    p = p0 + c;
  }
  return std::clamp(p, 0.0, 1.0);
}

std::vector<ObservationRecord> generate_assignments(std::int64_t horizon, const RiskModel& model,
                                                    const PropensityModel& propensity,
                                                    const StreamSeeds& seeds, std::size_t dimension) {
  if (horizon < 1) throw InputError("generate_stream: horizon must be >= 1");
  if (model.dimension() != dimension) throw InputError("generate_stream: model dimension mismatch");
  std::vector<ObservationRecord> records(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    auto& r = records[static_cast<std::size_t>(t - 1)];
    r.t = t;
    SplitMix64 cov_rng(seeds.covariates, static_cast<std::uint64_t>(t), purpose::kCovariates);
    r.x = sample_covariates(cov_rng, dimension);
    r.f0 = model.predict_risk(r.x, 0);
    r.f1 = model.predict_risk(r.x, 1);
    SplitMix64 treat_rng(seeds.treatment, static_cast<std::uint64_t>(t), purpose::kTreatment);
    const TreatmentDraw draw = sample_treatment(propensity, r.f0, r.f1, treat_rng);
    r.a = draw.a;
    r.propensity_used = draw.propensity;
  }
  return records;
}

double outcome_probability(const ObservationRecord& record, int a, const StreamSettings& settings) {
  double p0 = 0.0;
  if (settings.baseline == OutcomeBaseline::Oracle) {
    p0 = true_risk_pre(record.x, a);
  } else {
    const double f = record.f_at(a);
    p0 = std::clamp(f - sign_of_risk(f) * settings.delta, 0.0, 1.0);
  }
  if (settings.shift) return apply_shift(p0, record.x, a, *settings.shift, record.t);
  return p0;
}

void draw_outcomes(std::span<ObservationRecord> records, const StreamSettings& settings,
                   std::uint64_t outcome_seed) {
  if (settings.shift) settings.shift->validate();
  for (auto& r : records) {
    const auto t = static_cast<std::uint64_t>(r.t);
    SplitMix64 rng0(outcome_seed, t, purpose::kOutcomeControl);
    SplitMix64 rng1(outcome_seed, t, purpose::kOutcomeTreated);
    r.y0 = bernoulli(rng0, outcome_probability(r, 0, settings));
    r.y1 = bernoulli(rng1, outcome_probability(r, 1, settings));
    r.y_obs = r.a == 1 ? r.y1 : r.y0;
  }
}

std::vector<ObservationRecord> generate_stream(const StreamSettings& settings, const RiskModel& model,
                                               const PropensityModel& propensity, const StreamSeeds& seeds) {
  auto records = generate_assignments(settings.horizon, model, propensity, seeds, settings.dimension);
  draw_outcomes(records, settings, seeds.outcomes);
  return records;
}

PropensityRange propensity_range(std::span<const ObservationRecord> records) {
  PropensityRange range;
  for (const auto& r : records) {
    range.min = std::min(range.min, r.propensity_used);
    range.max = std::max(range.max, r.propensity_used);
  }
  return range;
}

}  // namespace causalmon
