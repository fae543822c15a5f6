#pragma once

#include <stdexcept>
#include <string>

namespace wettix {

// Bad input: config values, violated preconditions, inadmissible kernels.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure while a valid configuration is being integrated.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PositivityViolation : ConfigError {
  double angle;
  double r_max_bound;  // max(R1,R2) must exceed this
  double r_min_bound;  // min(R1,R2) must stay below this
  PositivityViolation(const std::string& what, double angle_, double rmax, double rmin)
      : ConfigError(what), angle(angle_), r_max_bound(rmax), r_min_bound(rmin) {}
};

struct NoInterface : SolverError {
  using SolverError::SolverError;
};

struct MultiplierNotBracketed : SolverError {
  using SolverError::SolverError;
};

struct OracleBreakdown : SolverError {
  using SolverError::SolverError;
};

}  // namespace wettix
