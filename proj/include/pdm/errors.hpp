#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violations of model-level preconditions or invariants (CLI exit code 4).
struct ModelError : Error {
    using Error::Error;
};

// Intrinsic adoption rate is zero where a positive rate is required.
struct DegenerateSpecError : ModelError {
    using ModelError::ModelError;
};

// Effective prospect pool too small for a valid re-specification.
struct DegeneratePoolError : ModelError {
    using ModelError::ModelError;
};

// Service level requested with zero shortfall probability.
struct ServiceLevelError : ModelError {
    using ModelError::ModelError;
};

// Point outside the configured (price, advertising) rectangle.
struct DomainError : ModelError {
    using ModelError::ModelError;
};

// Quantity is mathematically undefined for the given inputs.
struct UndefinedValueError : ModelError {
    using ModelError::ModelError;
};

// Degenerate or invalid input point set for triangulation.
struct TriangulationError : ModelError {
    using ModelError::ModelError;
};

// Malformed data file or configuration (CLI exit code 3).
struct ParseError : Error {
    using Error::Error;
};

// A construction-time invariant of the library itself was breached (CLI exit code 5).
struct InternalError : Error {
    using Error::Error;
};

} // namespace pdm
