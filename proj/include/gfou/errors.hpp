#pragma once

#include <stdexcept>
#include <string>

namespace gfou {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// An iterative method stopped before reaching its accuracy target.
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Request exceeds a fixed size cap (grid points, matrix size).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Covariance factorization lost positive definiteness.
struct FactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A process spec failed its existence or stationarity gate.
struct GateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gfou
