#pragma once

#include <stdexcept>
#include <string>

namespace jps {

// Failure taxonomy shared by all modules.  The CLI maps these to process
// exit codes: ConfigError -> 2, DegeneracyLost -> 3, NoContraction -> 4,
// every other Error subclass -> 5.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration / input data.  `field` holds the
// dotted path of the offending entry when the error originates from a
// config file ("solve.dt", "grid.modes[1]", ...).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what_arg, std::string field_path = "")
      : Error(field_path.empty() ? what_arg : field_path + ": " + what_arg),
        field(std::move(field_path)) {}
  std::string field;
};

// Temperature left the certified interval and a certified bound no longer
// covers the requested evaluation.
struct RangeViolation : Error { using Error::Error; };

// Sound speed evaluated non-positive (certification or evaluation time).
struct NonPositiveSpeed : Error { using Error::Error; };

// Two fields (or a field and an operator) live on different grids.
struct GridMismatch : Error { using Error::Error; };

// Two trajectories do not share the same time mesh / grid.
struct MeshMismatch : Error { using Error::Error; };

// Inner linear solve failed to reach its residual tolerance.
struct SolveDiverged : Error { using Error::Error; };

// A sampled coefficient left the floors/caps promised by its track.
struct CoefficientFloorViolated : Error { using Error::Error; };

// NaN or Inf detected in an evolved state.
struct NonFiniteState : Error { using Error::Error; };

// Fixed-point iteration: difference ratios stayed >= 1 for three
// consecutive iterations.
struct NoContraction : Error { using Error::Error; };

// Fixed-point iteration: min over space-time of (1 - 2 k(Theta) p) fell to
// or below the configured floor.
struct DegeneracyLost : Error { using Error::Error; };

// Fixed-point iteration did not converge within the iteration budget.
struct MaxIterExceeded : Error { using Error::Error; };

// A weighted norm was asked to use a negative weight.
struct NegativeWeight : Error { using Error::Error; };

// Gronwall envelope was handed a negative rate sample.
struct NegativeA : Error { using Error::Error; };

// Initial data violates the smallness bound required before the coupled
// solve starts.
struct PreconditionViolated : Error { using Error::Error; };

}  // namespace jps
