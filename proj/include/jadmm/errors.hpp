#pragma once

#include <stdexcept>
#include <string>

namespace jadmm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Operator with vanishing norm where a nonzero one is required.
struct ZeroOperator : Error {
    using Error::Error;
};

/// Relaxation parameter outside the admissible open interval (0, 2).
struct ThetaOutOfRange : Error {
    using Error::Error;
};

/// Some delta_i <= 0 where a certified configuration is required.
struct InfeasibleDeltas : Error {
    using Error::Error;
};

/// No feasible proximal moduli exist for the requested penalty.
/// Carries the smallest penalty estimate at which the window opens.
struct InfeasibleForBeta : Error {
    InfeasibleForBeta(const std::string& what, double beta_min_)
        : Error(what), beta_min(beta_min_) {}
    double beta_min;
};

struct MissingLowerBound : Error {
    using Error::Error;
};

/// Block subproblem Hessian not positive definite.
struct SingularSystem : Error {
    using Error::Error;
};

/// No exact solve path for the given function/generator pair.
struct NoClosedForm : Error {
    using Error::Error;
};

/// Certificate requested for a run whose parameters are not certified.
struct UncertifiedRun : Error {
    using Error::Error;
};

/// Iterative inner solver did not reach its gradient tolerance.
struct InnerSolverFailure : Error {
    using Error::Error;
};

}  // namespace jadmm
