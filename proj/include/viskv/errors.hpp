#pragma once

#include <stdexcept>
#include <string>

namespace viskv {

/// Bad configuration: unknown keys, malformed values, mismatched grids.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Violated domain constraint: non-positive lengths, infeasible parameter sets,
/// insufficient history coverage.
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-finite data, singular linear systems.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Process exit codes used by the CLI, one per error class.
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDomainError = 3;
inline constexpr int kExitNumericError = 4;

} // namespace viskv
