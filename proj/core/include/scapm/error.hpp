#pragma once

#include <stdexcept>
#include <string>

namespace scapm {

/// Shape or rank problem in the inputs: dimension mismatch, rank-deficient
/// volatility matrix (incomplete market), bundle/spec disagreement.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// mu - r*1 is not in the column span of sigma.
class NonViableMarket : public std::runtime_error {
 public:
  NonViableMarket(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Bad simulation or schedule configuration (non-positive horizon, segment
/// boundary off the grid, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace scapm
