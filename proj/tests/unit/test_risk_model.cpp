#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "causalmon/errors.hpp"
#include "causalmon/risk_model.hpp"
#include "causalmon/rng.hpp"
#include "oracles.hpp"

using namespace causalmon;

namespace {

std::vector<double> unit_x(std::size_t d, std::size_t i, double v) {
  std::vector<double> x(d, 0.0);
  x[i] = v;
  return x;
}

}  // namespace

TEST(RiskModel, ZeroInputGivesHalf) {
  const auto m = RiskModel::oracle();
  EXPECT_DOUBLE_EQ(m.predict_risk(std::vector<double>(10, 0.0), 0), 0.5);
}

TEST(RiskModel, OracleMatchesHandEvaluatedLogit) {
  const auto m = RiskModel::oracle();
  const double expect_a0 = oracle::sigmoid(oracle::true_logit(2.0, 0.0, 0));
  const double expect_a1 = oracle::sigmoid(oracle::true_logit(0.0, 1.0, 1));
  EXPECT_NEAR(expect_a0, 0.26894, 5e-6);
  EXPECT_NEAR(expect_a1, 0.81757, 5e-6);
  EXPECT_NEAR(m.predict_risk(unit_x(10, 0, 2.0), 0), expect_a0, 1e-15);
  EXPECT_NEAR(m.predict_risk(unit_x(10, 1, 1.0), 1), expect_a1, 1e-15);
}

TEST(RiskModel, BinarizeIsStrict) {
  EXPECT_EQ(binarize_risk(0.7, 0.5), 1);
  EXPECT_EQ(binarize_risk(0.5, 0.5), 0);
  EXPECT_EQ(binarize_risk(0.2, 0.5), 0);
}

TEST(RiskModel, SignTieBreaksPositive) {
  EXPECT_EQ(sign_of_risk(0.8), 1);
  EXPECT_EQ(sign_of_risk(0.3), -1);
  EXPECT_EQ(sign_of_risk(0.5), 1);
}

TEST(RiskModel, WrongDimensionIsRejected) {
  const auto m = RiskModel::oracle();
  EXPECT_THROW(m.predict_risk(std::vector<double>(3, 0.0), 0), InputError);
  EXPECT_THROW(RiskModel({1.0, 2.0}, 10), InputError);
}

TEST(RiskModel, SaveLoadRoundTripsExactly) {
  std::vector<double> coefs(RiskModel::coefficient_count(10));
  SplitMix64 rng(7);
  for (auto& c : coefs) c = uniform01(rng) * 6.0 - 3.0 + 1e-13;
  const RiskModel m(coefs, 10, 0.37);
  std::stringstream ss;
  m.save(ss);
  const RiskModel back = RiskModel::load(ss);
  EXPECT_EQ(back, m);
}

TEST(RiskModelProperty, RiskInUnitIntervalAndConsistentWithBinarizeAndSign) {
  SplitMix64 rng(11);
  std::normal_distribution<double> wide(0.0, 20.0);
  const auto m = RiskModel::oracle();
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<double> x(10);
    for (auto& v : x) v = wide(rng);
    const int a = trial % 2;
    const double b = uniform01(rng);
    const RiskModel mb({m.coefficients().begin(), m.coefficients().end()}, 10, b);
    const double r = mb.predict_risk(x, a);
    ASSERT_GE(r, 0.0);
    ASSERT_LE(r, 1.0);
    ASSERT_EQ(mb.binarize(x, a) == 1, r > b);
    ASSERT_EQ(mb.predicted_sign(x, a) == 1, r >= 0.5);
  }
}

TEST(LogisticFit, RecoversOracleCoefficients) {
  SplitMix64 rng(2024);
  std::vector<TrainingExample> data(50000);
  for (auto& ex : data) {
    std::normal_distribution<double> n(0.0, 2.0);
    ex.x.resize(10);
    for (auto& v : ex.x) v = n(rng);
    ex.a = bernoulli(rng, 0.5);
    ex.y = bernoulli(rng, oracle::sigmoid(oracle::true_logit(ex.x[0], ex.x[1], ex.a)));
  }
  const RiskModel fit = fit_risk_model(data, 10);
  const auto c = fit.coefficients();
  EXPECT_NEAR(c[1], -0.5, 0.1);   // x1
  EXPECT_NEAR(c[2], -1.0, 0.1);   // x2
  EXPECT_NEAR(c[11], 0.5, 0.1);   // a
  EXPECT_NEAR(c[12], 1.0, 0.1);   // x1:a
  EXPECT_NEAR(c[13], 2.0, 0.1);   // x2:a
  EXPECT_NEAR(c[0], 0.0, 0.1);
}

TEST(LogisticFit, AllZeroLabelsAreDegenerate) {
  std::vector<std::vector<double>> x(100, std::vector<double>{0.0});
  std::vector<int> y(100, 0);
  for (std::size_t i = 0; i < x.size(); ++i) x[i][0] = static_cast<double>(i) / 10.0;
  EXPECT_THROW(fit_logistic(x, y), DegenerateDataError);
}

TEST(LogisticFit, SymmetricDataGivesZeroIntercept) {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int i = -50; i <= 50; ++i) {
    if (i == 0) continue;
    // mirror pairs: (v, 1), (-v, 0) plus (v, 0), (-v, 1) at a lower rate
    const double v = i / 10.0;
    x.push_back({v});
    y.push_back(v > 0 ? 1 : 0);
    if (i % 3 == 0) {
      x.push_back({v});
      y.push_back(v > 0 ? 0 : 1);
    }
  }
  const auto fit = fit_logistic(x, y);
  EXPECT_NEAR(fit.coefficients[0], 0.0, 1e-8);
  EXPECT_GT(fit.coefficients[1], 0.0);
}

TEST(LogisticFit, RecoveryWithinThreeStandardErrorsAsNGrows) {
  // Truth: intercept -0.25, slope 1.5. The standard error of the slope comes
  // from the Fisher information evaluated at the truth.
  for (std::size_t n : {2000u, 20000u, 200000u}) {
    SplitMix64 rng(n);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> x(n, std::vector<double>(1));
    std::vector<int> y(n);
    double i00 = 0.0, i01 = 0.0, i11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i][0] = g(rng);
      const double p = oracle::sigmoid(-0.25 + 1.5 * x[i][0]);
      y[i] = bernoulli(rng, p);
      const double w = p * (1.0 - p);
      i00 += w;
      i01 += w * x[i][0];
      i11 += w * x[i][0] * x[i][0];
    }
    const double se_slope = std::sqrt(i00 / (i00 * i11 - i01 * i01));
    const double se_intercept = std::sqrt(i11 / (i00 * i11 - i01 * i01));
    const auto fit = fit_logistic(x, y);
    EXPECT_LT(std::abs(fit.coefficients[0] + 0.25), 3.0 * se_intercept) << n;
    EXPECT_LT(std::abs(fit.coefficients[1] - 1.5), 3.0 * se_slope) << n;
  }
}

TEST(LogisticFit, TooFewRowsIsDegenerate) {
  std::vector<std::vector<double>> x = {{1.0, 2.0, 3.0}, {0.0, 1.0, 0.5}};
  std::vector<int> y = {0, 1};
  EXPECT_THROW(fit_logistic(x, y), DegenerateDataError);
}
