#pragma once

#include <stdexcept>
#include <string>

namespace mmlab {

// Domain failures. The command-line tool maps every one of these to exit
// status 3; usage mistakes (bad flags, malformed config) exit with 2.

struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested a stationary point of the open reaction with alpha = k0/(k2*eT) >= 1,
// where substrate accumulates without bound.
struct NoStationaryPointError : std::domain_error {
    using std::domain_error::domain_error;
};

// Event budget cannot cover burn-in plus at least one event per batch.
struct InsufficientBudgetError : std::domain_error {
    using std::domain_error::domain_error;
};

// Non-finite state encountered during time stepping.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Df(z)P(z) is numerically singular, so the slow-manifold projector is undefined.
struct HyperbolicityError : std::domain_error {
    using std::domain_error::domain_error;
};

// Point handed to a projection routine does not lie on the critical manifold.
struct ManifoldDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Linear solve for the stationary covariance has no unique solution.
struct SingularSystemError : std::domain_error {
    using std::domain_error::domain_error;
};

} // namespace mmlab
