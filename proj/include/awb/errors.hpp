#pragma once

#include <stdexcept>
#include <string>

namespace awb {

// Inputs outside the model's domain (t >= T, alpha out of range, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Malformed arguments / specs (bad grid policy, empty candidate list, ...).
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure at runtime (factorization failure, step-size guard).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate statistics: zero-energy MLE, single-point quadratic variation.
struct degenerate_error : domain_error {
    using domain_error::domain_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace awb
