#ifndef KCAV_ERRORS_HPP
#define KCAV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kcav {

// Closed-form two-excitation solution is invalid (degenerate cubic); the
// numeric diagonalization path must be used instead.
struct DegenerateCubicError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A bracketing scan found no sign change in the searched interval.
struct RootNotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The trace-constrained linear system is singular: the Liouvillian has a
// degenerate steady-state manifold.
struct NonUniqueSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// g2(0) requested for a state whose mean photon number is below the
// underflow floor.
struct UndefinedCorrelationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An order-by-order perturbative block solve is singular, or a closed-form
// denominator (P, Q, rho44) fell below the underflow floor.
struct ResonanceSingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncation growth hit its cap before the requested tolerance was reached.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration text could not be parsed or violates a parameter invariant.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line_no)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg
                                         : msg),
          line(line_no) {}
    int line;
};

}  // namespace kcav

#endif
