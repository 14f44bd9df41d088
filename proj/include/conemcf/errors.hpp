#pragma once

#include <stdexcept>
#include <string>

namespace conemcf {

// Base class for every failure the solvers surface to callers (and the CLI
// maps to exit status 1).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive integrator could not meet its tolerance (stiff/blown-up trajectory).
struct StepFailure : SolverError {
  using SolverError::SolverError;
};

// Shooting bracket endpoints do not classify as required.
struct BracketFailure : SolverError {
  using SolverError::SolverError;
};

// A limit/iteration did not settle.
struct NoConvergence : SolverError {
  using SolverError::SolverError;
};

// x -> x/u lost invertibility (|u_r| >= 1 somewhere).
struct InversionFailure : SolverError {
  using SolverError::SolverError;
};

// Computed diffusion coefficient dropped to <= 0.
struct ParabolicityLoss : SolverError {
  using SolverError::SolverError;
};

// A time step violated a discrete invariant; caller should retry with dt/2.
struct StepRejected : SolverError {
  using SolverError::SolverError;
};

// Evaluation outside the stored grid range.
struct OutOfRange : SolverError {
  using SolverError::SolverError;
};

// Scaling fit asked for on degenerate data.
struct DegenerateFit : SolverError {
  using SolverError::SolverError;
};

}  // namespace conemcf
