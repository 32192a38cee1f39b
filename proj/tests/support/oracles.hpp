#pragma once
// Independent reference computations for tests. Nothing here calls into the
// library paths it is used to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Coefficients of the simulation truth, written out term by term.
inline double true_logit(double x1, double x2, int a) {
  return -0.5 * x1 - 1.0 * x2 + 0.5 * a + 1.0 * x1 * a + 2.0 * x2 * a;
}

/// max over changepoints tau <= t of sum_{i=tau}^{t} s_i, for every t.
inline std::vector<double> brute_force_cusum(std::span<const double> sums) {
  std::vector<double> out(sums.size());
  for (std::size_t t = 0; t < sums.size(); ++t) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t tau = 0; tau <= t; ++tau) {
      double s = 0.0;
      for (std::size_t i = tau; i <= t; ++i) s += sums[i];
      best = std::max(best, s);
    }
    out[t] = best;
  }
  return out;
}

/// First batch (1-based) with chart > h by linear scan.
inline std::optional<std::size_t> first_crossing(std::span<const double> chart, std::span<const double> h) {
  for (std::size_t i = 0; i < chart.size(); ++i) {
    if (chart[i] > h[i]) return i + 1;
  }
  return std::nullopt;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace oracle
