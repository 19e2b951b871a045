#pragma once

#include <stdexcept>
#include <string>

namespace kfdp {

// Invalid parameters or inconsistent inputs supplied by a caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function (e.g. |rho| > 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numeric procedure could not produce a trustworthy answer
// (calibration without a sign change, non-monotone trajectory, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kfdp
