#pragma once

#include <stdexcept>
#include <string>

namespace malab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the admissible parameter range (e.g. alpha <= -2).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A stencil, section or sample point leaves the grid.
class OutOfDomainError : public Error {
public:
    using Error::Error;
};

/// Quadrature or interpolation did not reach the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Iterative method stalled or diverged.
class IterationError : public Error {
public:
    IterationError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Input is degenerate for the requested operation (non-convex slice, flat polygon, ...).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Least-squares fit is ill-conditioned.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace malab
