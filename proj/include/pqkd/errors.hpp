#pragma once

#include <stdexcept>
#include <string>

namespace pqkd {

/// Precondition violated by a caller-supplied argument.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Numerical integration did not reach the requested tolerance, or the
/// integration domain has zero measure.
class QuadratureError : public std::runtime_error {
public:
  enum class Kind { ToleranceNotMet, EmptyRegion, Degenerate };

  QuadratureError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

/// Malformed linear program (unknown variable, bad dimensions, missing data).
class LpBuildError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid sweep or protocol configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace pqkd
