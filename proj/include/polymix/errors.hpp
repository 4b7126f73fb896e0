#pragma once

#include <stdexcept>
#include <string>

namespace polymix {

/// Invalid configuration or input; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown (non-convergent quadrature, majorant violation, ...);
/// maps to CLI exit code 4.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Collision parameters on the boundary where a parametrization degenerates.
class DegenerateParametrization : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

}  // namespace polymix
