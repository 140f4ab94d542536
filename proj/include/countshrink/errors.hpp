#pragma once

#include <stdexcept>
#include <string>

namespace countshrink {

// A parameter lies outside the domain of the distribution or update.
class DomainError : public std::invalid_argument {
 public:
  DomainError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// The prior family has no local scale, or the operation is undefined for it.
class UnsupportedFamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature or an iterative solver did not reach the requested tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what), achieved_tolerance_(achieved_tolerance) {}
  double achieved_tolerance() const { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

// A request exceeds a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid user input (files, configuration).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Gibbs sweep produced a non-finite value.
class ChainError : public std::runtime_error {
 public:
  ChainError(std::size_t sweep, std::string parameter)
      : std::runtime_error("non-finite " + parameter + " after sweep " +
                           std::to_string(sweep)),
        sweep_(sweep),
        parameter_(std::move(parameter)) {}
  std::size_t sweep() const { return sweep_; }
  const std::string& parameter() const { return parameter_; }

 private:
  std::size_t sweep_;
  std::string parameter_;
};

}  // namespace countshrink
