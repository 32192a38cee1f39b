#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "causalmon/rng.hpp"

namespace causalmon {

struct ObservationRecord;

enum class PropensitySource { Oracle, Estimated };

/// Treatment assignment law logit P(A=1) = beta * (f1 - f0), optionally
/// clipped into [epsilon, 1 - epsilon].
class PropensityModel {
 public:
  PropensityModel() = default;
  PropensityModel(double beta, PropensitySource source, double epsilon_floor = 0.0);

  /// Clinicians closely follow the algorithm: beta = -6, no floor.
  static PropensityModel observational();
  /// Randomisation that favours the recommendation: beta = -2, floor 0.01.
  static PropensityModel interventional();

  double beta() const noexcept { return beta_; }
  PropensitySource source() const noexcept { return source_; }
  double epsilon_floor() const noexcept { return epsilon_floor_; }

  /// P(A = 1 | f0, f1).
  double score(double f0, double f1) const;

  void save(std::ostream& out) const;
  static PropensityModel load(std::istream& in);

  friend bool operator==(const PropensityModel&, const PropensityModel&) = default;

 private:
  double beta_ = 0.0;
  PropensitySource source_ = PropensitySource::Oracle;
  double epsilon_floor_ = 0.0;
};

double propensity_score(const PropensityModel& m, double f0, double f1);

struct TreatmentDraw {
  int a = 0;
  double propensity = 0.5;  // P(A = 1) used for the draw
};

template <class Urbg>
TreatmentDraw sample_treatment(const PropensityModel& m, double f0, double f1, Urbg& rng) {
  const double p = m.score(f0, f1);
  return TreatmentDraw{bernoulli(rng, p), p};
}

struct PropensityFitConfig {
  int max_iterations = 100;
  double tolerance = 1e-8;
};

struct PropensityFit {
  PropensityModel model;
  double standard_error = 0.0;
  int iterations = 0;
};

/// Single-coefficient logistic MLE of A on (f1 - f0), no intercept.
PropensityFit fit_propensity(std::span<const ObservationRecord> pre_monitoring,
                             const PropensityFitConfig& config = {});

std::string to_string(PropensitySource source);
PropensitySource propensity_source_from_string(const std::string& text);

}  // namespace causalmon
