#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace causalmon {

inline constexpr std::size_t kCovariateDimension = 10;

inline double logistic(double eta) noexcept {
  // Split on sign so that exp() never overflows.
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

/// 1{risk > b}; the boundary maps to 0.
inline int binarize_risk(double risk, double b) noexcept { return risk > b ? 1 : 0; }

/// sign(risk - 0.5) with sign(0) := +1.
inline int sign_of_risk(double risk) noexcept { return risk >= 0.5 ? 1 : -1; }

/// Locked risk model with a logistic link over the design
///   [1, x_1..x_d, a, x_1*a .. x_d*a].
/// Immutable after construction, so a single instance can be shared by
/// simulation workers.
class RiskModel {
 public:
  RiskModel(std::vector<double> coefficients, std::size_t dimension, double threshold_b = 0.5);

  /// Pre-change outcome model used by the simulator:
  /// logit = -0.5 x1 - x2 + 0.5 a + x1 a + 2 x2 a.
  static RiskModel oracle(std::size_t dimension = kCovariateDimension, double threshold_b = 0.5);

  std::size_t dimension() const noexcept { return dimension_; }
  double threshold() const noexcept { return threshold_b_; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }

  double linear_predictor(std::span<const double> x, int a) const;
  double predict_risk(std::span<const double> x, int a) const;
  int binarize(std::span<const double> x, int a) const;
  int predicted_sign(std::span<const double> x, int a) const;

  static std::size_t coefficient_count(std::size_t dimension) noexcept { return 2 * dimension + 2; }
  /// intercept, x1..xd, a, x1:a..xd:a
  static std::vector<std::string> coefficient_names(std::size_t dimension);

  void save(std::ostream& out) const;
  static RiskModel load(std::istream& in);

  friend bool operator==(const RiskModel&, const RiskModel&) = default;

 private:
  std::vector<double> coefficients_;
  std::size_t dimension_;
  double threshold_b_;
};

struct LogisticFitConfig {
  int max_iterations = 100;
  double tolerance = 1e-8;
  double ridge = 1e-6;
};

struct LogisticFit {
  std::vector<double> coefficients;  // intercept first
  int iterations = 0;
};

/// Ridge-penalised logistic regression by Newton-Raphson (IRLS). An intercept
/// column is prepended; the intercept is not penalised. Converged when the
/// largest absolute coefficient change drops below `tolerance`.
LogisticFit fit_logistic(std::span<const std::vector<double>> features, std::span<const int> labels,
                         const LogisticFitConfig& config = {});

struct TrainingExample {
  std::vector<double> x;
  int a = 0;
  int y = 0;
};

/// Fits the full treatment-interaction design and wraps it in a RiskModel.
RiskModel fit_risk_model(std::span<const TrainingExample> data, std::size_t dimension,
                         const LogisticFitConfig& config = {}, double threshold_b = 0.5);

}  // namespace causalmon
