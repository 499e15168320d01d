#pragma once

#include <stdexcept>
#include <string>

namespace preint {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The root finder hit its iteration or bracketing cap.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    /// Last bracket held by the solver when it gave up.
    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Reference quadrature did not reach its tolerance.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Estimator asked for a target it cannot evaluate (plain MC/QMC on the pdf).
class UnsupportedTarget : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace preint
