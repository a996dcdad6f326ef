#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace advsysid {

// Thrown for inputs that violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cholesky broke down: the matrix is singular or indefinite.
class DegenerateGram : public std::runtime_error {
 public:
  DegenerateGram(const std::string& what, double min_pivot)
      : std::runtime_error(what), min_pivot_(min_pivot) {}
  double min_pivot() const noexcept { return min_pivot_; }

 private:
  double min_pivot_;
};

class InsufficientExcitation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Divergence : public std::runtime_error {
 public:
  Divergence(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// The LAD linear program could not be set up or solved. `certificate`
// describes the failure (e.g. the rank of the regressor matrix).
class LpFailure : public std::runtime_error {
 public:
  LpFailure(const std::string& what, std::string certificate)
      : std::runtime_error(what), certificate_(std::move(certificate)) {}
  const std::string& certificate() const noexcept { return certificate_; }

 private:
  std::string certificate_;
};

class NetTooLarge : public std::runtime_error {
 public:
  NetTooLarge(const std::string& what, double bound)
      : std::runtime_error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

}  // namespace advsysid
