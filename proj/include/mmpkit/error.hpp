#pragma once

#include <stdexcept>
#include <string>

namespace mmpkit {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSV header does not match the expected schema.
struct SchemaError : Error {
  using Error::Error;
};

/// A cell could not be parsed as a finite number.
struct ParseError : Error {
  using Error::Error;
};

/// File contains a header but no data rows.
struct EmptyDatasetError : Error {
  using Error::Error;
};

/// Too few rows for the requested statistic.
struct InsufficientDataError : Error {
  using Error::Error;
};

/// A column has zero variance (or min == max) and cannot be scaled.
struct UnfittableScalerError : Error {
  using Error::Error;
};

/// Cosine similarity requested for a zero-norm vector.
struct UndefinedAngleError : Error {
  using Error::Error;
};

/// An argument violates a precondition.
struct ArgumentError : Error {
  using Error::Error;
};

/// A configuration value is invalid or inconsistent.
struct ConfigError : Error {
  using Error::Error;
};

/// Iterative training produced non-finite parameters or loss.
struct TrainingDivergedError : Error {
  using Error::Error;
};

/// Design matrix is numerically rank-deficient.
struct SingularityError : Error {
  using Error::Error;
};

/// No training row was out-of-bag in any ensemble member.
struct OobUndefinedError : Error {
  using Error::Error;
};

/// Sparse Bayesian fit could not admit a single basis function.
struct DegenerateFitError : Error {
  using Error::Error;
};

}  // namespace mmpkit
