#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace causalmon {

/// Malformed arguments: dimension mismatches, bad enum strings, grid mismatches.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data that cannot support the requested fit (single class, single arm).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration ran out of iterations. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

/// An inverse-propensity weight was requested at a propensity of 0 or 1.
class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A monitoring cell (threshold or weight) has no usable records.
class DegenerateCellError : public std::runtime_error {
 public:
  DegenerateCellError(const std::string& what, std::string cell)
      : std::runtime_error(what), cell_(std::move(cell)) {}

  const std::string& cell() const noexcept { return cell_; }

 private:
  std::string cell_;
};

/// The spending budget asks for more crossings than there are surviving paths.
class ScheduleSaturatedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace causalmon
