#pragma once

#include <stdexcept>
#include <string>

namespace ekdiff {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside its admissible range (order not in (0,1], negative time, ...).
struct DomainError : Error {
    using Error::Error;
};

// An operation was asked to evaluate a density that has degenerated to a Dirac
// mass (order == 1), which has no pointwise values.
struct DiracOrderError : Error {
    using Error::Error;
};

// An iterative evaluation or quadrature failed to reach its tolerance within
// its budget.
struct NonConvergenceError : Error {
    using Error::Error;
};

// A lookup table is malformed or was built with parameters that cannot serve
// the current request.
struct TableError : Error {
    using Error::Error;
};

// A grid or step-count request is too coarse (or too fine) for the scheme to
// operate as documented.
struct ResolutionError : Error {
    using Error::Error;
};

// Two objects that must share parameters (orders, grids, time axes) disagree.
struct ParamMismatchError : Error {
    using Error::Error;
};

// A time-stepped field does not retain the history needed for the requested
// evaluation.
struct InsufficientHistoryError : Error {
    using Error::Error;
};

// An ensemble is too small for the requested statistic.
struct InsufficientPathsError : Error {
    using Error::Error;
};

// A linear-algebra step failed beyond recovery (factorization breakdown).
struct LinAlgError : Error {
    using Error::Error;
};

// A covariance factorization found the matrix indefinite even after the
// allowed diagonal repair.
struct NotPositiveDefiniteError : LinAlgError {
    using LinAlgError::LinAlgError;
};

// Evaluation was requested at a point where the object is genuinely singular
// (for instance a density at its blow-up point).
struct SingularityError : Error {
    using Error::Error;
};

// Request is recognized but intentionally not implemented for these inputs.
struct UnsupportedError : Error {
    using Error::Error;
};

}  // namespace ekdiff
