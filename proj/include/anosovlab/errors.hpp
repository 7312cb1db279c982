#pragma once

#include <stdexcept>
#include <string>

namespace anosovlab {

// Configuration / validation problems. CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failures. CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergence : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateFrame : NumericalError {
  using NumericalError::NumericalError;
};

struct ResolutionExceeded : NumericalError {
  using NumericalError::NumericalError;
};

struct NoIntersection : NumericalError {
  using NumericalError::NumericalError;
};

struct OutsidePatch : NumericalError {
  using NumericalError::NumericalError;
};

struct EmptyWindow : NumericalError {
  using NumericalError::NumericalError;
};

struct BudgetExceeded : NumericalError {
  using NumericalError::NumericalError;
};

struct NoCandidate : NumericalError {
  using NumericalError::NumericalError;
};

struct RootSplitFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct IOFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace anosovlab
