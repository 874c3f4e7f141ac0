#ifndef CLERAY_ERRORS_HPP_
#define CLERAY_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cleray {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

/// The pushed point z + eps N(z) left the admissible collar.
class EpsTooLarge : public Error {
 public:
  using Error::Error;
};

class CoverFailure : public Error {
 public:
  using Error::Error;
};

/// Target too close to the boundary for direct quadrature on this grid.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

class NonFiniteIntegrand : public Error {
 public:
  using Error::Error;
};

/// Boundary integral requested in a configuration where it is not absolutely convergent.
class NonIntegrable : public Error {
 public:
  using Error::Error;
};

class ChartMarginViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace cleray

#endif  // CLERAY_ERRORS_HPP_
