#include "causalmon/risk_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <istream>
#include <ostream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"

namespace causalmon {

RiskModel::RiskModel(std::vector<double> coefficients, std::size_t dimension, double threshold_b)
    : coefficients_(std::move(coefficients)), dimension_(dimension), threshold_b_(threshold_b) {
  if (coefficients_.size() != coefficient_count(dimension_)) {
    throw InputError("RiskModel: expected " + std::to_string(coefficient_count(dimension_)) +
                     " coefficients, got " + std::to_string(coefficients_.size()));
  }
  if (!(threshold_b_ > 0.0 && threshold_b_ < 1.0)) {
    throw InputError("RiskModel: threshold b must lie in (0, 1)");
  }
}

RiskModel RiskModel::oracle(std::size_t dimension, double threshold_b) {
  if (dimension < 2) throw InputError("oracle model needs at least two covariates");
  std::vector<double> beta(coefficient_count(dimension), 0.0);
  beta[1] = -0.5;                  // x1
  beta[2] = -1.0;                  // x2
  beta[dimension + 1] = 0.5;       // a
  beta[dimension + 2] = 1.0;       // x1:a
  beta[dimension + 3] = 2.0;       // x2:a
  return RiskModel(std::move(beta), dimension, threshold_b);
}

double RiskModel::linear_predictor(std::span<const double> x, int a) const {
  if (x.size() != dimension_) {
    throw InputError("predict_risk: covariate dimension " + std::to_string(x.size()) +
                     " != model dimension " + std::to_string(dimension_));
  }
  if (a != 0 && a != 1) throw InputError("predict_risk: treatment must be 0 or 1");
  double eta = coefficients_[0];
  for (std::size_t j = 0; j < dimension_; ++j) eta += coefficients_[1 + j] * x[j];
  if (a == 1) {
    eta += coefficients_[dimension_ + 1];
    for (std::size_t j = 0; j < dimension_; ++j) eta += coefficients_[dimension_ + 2 + j] * x[j];
  }
  return eta;
}

double RiskModel::predict_risk(std::span<const double> x, int a) const {
  return logistic(linear_predictor(x, a));
}

int RiskModel::binarize(std::span<const double> x, int a) const {
  return binarize_risk(predict_risk(x, a), threshold_b_);
}

int RiskModel::predicted_sign(std::span<const double> x, int a) const {
  return sign_of_risk(predict_risk(x, a));
}

std::vector<std::string> RiskModel::coefficient_names(std::size_t dimension) {
  std::vector<std::string> names;
  names.reserve(coefficient_count(dimension));
  names.emplace_back("intercept");
  for (std::size_t j = 1; j <= dimension; ++j) names.push_back("x" + std::to_string(j));
  names.emplace_back("a");
  for (std::size_t j = 1; j <= dimension; ++j) names.push_back("x" + std::to_string(j) + ":a");
  return names;
}

void RiskModel::save(std::ostream& out) const {
  KeyValueRecord kv;
  kv.set("kind", std::string("risk_model"));
  kv.set("dimension", std::to_string(dimension_));
  kv.set("threshold_b", threshold_b_);
  const auto names = coefficient_names(dimension_);
  for (std::size_t i = 0; i < names.size(); ++i) kv.set("coef." + names[i], coefficients_[i]);
  kv.write(out);
}

RiskModel RiskModel::load(std::istream& in) {
  const KeyValueRecord kv = KeyValueRecord::read(in);
  if (kv.text("kind") != "risk_model") throw InputError("not a risk_model record");
  const double d = kv.number("dimension");
  if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) {
    throw InputError("invalid dimension");
  }
  const auto dimension = static_cast<std::size_t>(d);
  const auto names = coefficient_names(dimension);
  std::vector<double> beta;
  beta.reserve(names.size());
  for (const auto& name : names) beta.push_back(kv.number("coef." + name));
  return RiskModel(std::move(beta), dimension, kv.number("threshold_b"));
}

LogisticFit fit_logistic(std::span<const std::vector<double>> features, std::span<const int> labels,
                         const LogisticFitConfig& config) {
  const std::size_t n = features.size();
  if (labels.size() != n) throw InputError("fit_logistic: features/labels length mismatch");
  if (n == 0) throw DegenerateDataError("fit_logistic: no data");
  const std::size_t p = features.front().size() + 1;
  if (n < p) throw DegenerateDataError("fit_logistic: fewer observations than coefficients");

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd y(n);
  bool seen0 = false, seen1 = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() + 1 != p) throw InputError("fit_logistic: ragged feature rows");
    if (labels[i] != 0 && labels[i] != 1) throw InputError("fit_logistic: labels must be 0/1");
    design(i, 0) = 1.0;
    for (std::size_t j = 1; j < p; ++j) design(i, j) = features[i][j - 1];
    y(i) = labels[i];
    (labels[i] ? seen1 : seen0) = true;
  }
  if (!(seen0 && seen1)) throw DegenerateDataError("fit_logistic: labels contain a single class");

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, config.ridge);
  penalty(0) = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd mu(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      mu(i) = logistic(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
    const Eigen::VectorXd gradient = design.transpose() * (y - mu) - penalty.cwiseProduct(beta);
    Eigen::MatrixXd information = design.transpose() * w.asDiagonal() * design;
    information.diagonal() += penalty;
    const Eigen::VectorXd step = information.ldlt().solve(gradient);
    beta += step;
    if (!beta.allFinite()) {
      throw ConvergenceError("fit_logistic: non-finite iterate",
                             std::vector<double>(beta.data(), beta.data() + p));
    }
    if (step.cwiseAbs().maxCoeff() < config.tolerance) {
      return LogisticFit{std::vector<double>(beta.data(), beta.data() + p), iter};
    }
  }
  throw ConvergenceError("fit_logistic: no convergence after " + std::to_string(config.max_iterations) +
                             " iterations",
                         std::vector<double>(beta.data(), beta.data() + p));
}

RiskModel fit_risk_model(std::span<const TrainingExample> data, std::size_t dimension,
                         const LogisticFitConfig& config, double threshold_b) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  rows.reserve(data.size());
  labels.reserve(data.size());
  for (const auto& ex : data) {
    if (ex.x.size() != dimension) throw InputError("fit_risk_model: covariate dimension mismatch");
    std::vector<double> row;
    row.reserve(2 * dimension + 1);
    row.insert(row.end(), ex.x.begin(), ex.x.end());
    row.push_back(ex.a);
    for (double xj : ex.x) row.push_back(xj * ex.a);
    rows.push_back(std::move(row));
    labels.push_back(ex.y);
  }
  LogisticFit fit = fit_logistic(rows, labels, config);
  return RiskModel(std::move(fit.coefficients), dimension, threshold_b);
}

}  // namespace causalmon
