#pragma once

#include <stdexcept>
#include <string>

namespace vigil {

// Error taxonomy. The CLI maps categories onto exit codes:
// data errors (bad inputs, malformed files) -> 2, numerical failures -> 3.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: violated invariants, malformed records, schema mismatches.
struct DataError : Error {
    using Error::Error;
};

// A density was evaluated at the boundary of its support with incompatible
// data (e.g. kappa = 0 with positive negative-observation counts).
struct BoundaryError : Error {
    using Error::Error;
};

// Inconsistent observation-type sets or vector lengths between inputs.
struct DimensionError : DataError {
    using DataError::DataError;
};

// Numerical failures: sampler did not converge, an ML fit broke down, a
// Monte Carlo routine was asked for more resolution than its draw budget.
struct NumericalError : Error {
    using Error::Error;
};

struct NonConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateSampleError : NumericalError {
    using NumericalError::NumericalError;
};

struct FitError : NumericalError {
    FitError(const std::string& parameter, const std::string& what)
        : NumericalError("fit failed for " + parameter + ": " + what),
          parameter_name(parameter) {}
    std::string parameter_name;
};

// rate_product requested before it was fitted.
struct MissingFitError : DataError {
    using DataError::DataError;
};

struct InsufficientDrawsError : NumericalError {
    using NumericalError::NumericalError;
};

// Record-file parse failure, carries 1-based row number.
struct ParseError : DataError {
    ParseError(long row_number, const std::string& what)
        : DataError("row " + std::to_string(row_number) + ": " + what),
          row(row_number) {}
    long row;
};

}  // namespace vigil
