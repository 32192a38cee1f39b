#include "causalmon/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"
#include "causalmon/risk_model.hpp"
#include "causalmon/simulator.hpp"

namespace causalmon {

PropensityModel::PropensityModel(double beta, PropensitySource source, double epsilon_floor)
    : beta_(beta), source_(source), epsilon_floor_(epsilon_floor) {
  if (!std::isfinite(beta_)) throw InputError("propensity: beta must be finite");
  if (!(epsilon_floor_ >= 0.0 && epsilon_floor_ < 0.5)) {
    throw InputError("propensity: epsilon floor must lie in [0, 0.5)");
  }
}

PropensityModel PropensityModel::observational() { return {-6.0, PropensitySource::Oracle, 0.0}; }

PropensityModel PropensityModel::interventional() { return {-2.0, PropensitySource::Oracle, 0.01}; }

double PropensityModel::score(double f0, double f1) const {
  const double p = logistic(beta_ * (f1 - f0));
  if (epsilon_floor_ > 0.0) return std::clamp(p, epsilon_floor_, 1.0 - epsilon_floor_);
  return p;
}

double propensity_score(const PropensityModel& m, double f0, double f1) { return m.score(f0, f1); }

void PropensityModel::save(std::ostream& out) const {
  KeyValueRecord kv;
  kv.set("kind", std::string("propensity_model"));
  kv.set("beta", beta_);
  kv.set("source", to_string(source_));
  kv.set("epsilon_floor", epsilon_floor_);
  kv.write(out);
}

PropensityModel PropensityModel::load(std::istream& in) {
  const KeyValueRecord kv = KeyValueRecord::read(in);
  if (kv.text("kind") != "propensity_model") throw InputError("not a propensity_model record");
  return PropensityModel(kv.number("beta"), propensity_source_from_string(kv.text("source")),
                         kv.number("epsilon_floor"));
}

PropensityFit fit_propensity(std::span<const ObservationRecord> pre_monitoring,
                             const PropensityFitConfig& config) {
  bool seen0 = false, seen1 = false;
  for (const auto& r : pre_monitoring) (r.a == 1 ? seen1 : seen0) = true;
  if (!(seen0 && seen1)) throw DegenerateDataError("fit_propensity: only one treatment value observed");

  double beta = 0.0;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    double score = 0.0, information = 0.0;
    for (const auto& r : pre_monitoring) {
      const double d = r.f1 - r.f0;
      const double mu = logistic(beta * d);
      score += d * (r.a - mu);
      information += d * d * mu * (1.0 - mu);
    }
    if (!(information > 0.0)) {
      throw DegenerateDataError("fit_propensity: no information (all predicted-risk differences are zero)");
    }
    const double step = score / information;
    beta += step;
    if (!std::isfinite(beta)) throw ConvergenceError("fit_propensity: diverged", {beta});
    if (std::abs(step) < config.tolerance) {
      double info_at_beta = 0.0;
      for (const auto& r : pre_monitoring) {
        const double d = r.f1 - r.f0;
        const double mu = logistic(beta * d);
        info_at_beta += d * d * mu * (1.0 - mu);
      }
      return PropensityFit{PropensityModel(beta, PropensitySource::Estimated, 0.0),
                           1.0 / std::sqrt(info_at_beta), iter};
    }
  }
  throw ConvergenceError("fit_propensity: no convergence", {beta});
}

std::string to_string(PropensitySource source) {
  return source == PropensitySource::Oracle ? "oracle" : "estimated";
}

PropensitySource propensity_source_from_string(const std::string& text) {
  if (text == "oracle") return PropensitySource::Oracle;
  if (text == "estimated") return PropensitySource::Estimated;
  throw InputError("unknown propensity source: " + text);
}

}  // namespace causalmon
