#pragma once

#include <stdexcept>
#include <string>

namespace gsis {

/// Base class for all library errors. `where` is "module.operation" context,
/// prepended to the message so CLI output can locate the failing call.
class Error : public std::runtime_error {
public:
    Error(const std::string& where, const std::string& what)
        : std::runtime_error("[" + where + "] " + what), where_(where) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Fields or kernels on mismatched partitions, wrong matrix shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid construction input (negative weights, asymmetry, bad parameter range).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to converge; carries the last residual.
class IterationError : public Error {
public:
    IterationError(const std::string& where, const std::string& what, double residual)
        : Error(where, what + " (last residual " + std::to_string(residual) + ")"),
          residual(residual) {}

    double residual;
};

/// Integrated state left the admissible domain, or a solver left its bracket.
class SolverError : public Error {
public:
    using Error::Error;
};

/// State exited [0,1] beyond the domain tolerance during integration.
class DomainViolationError : public Error {
public:
    DomainViolationError(const std::string& where, const std::string& what, double t)
        : Error(where, what), t(t) {}

    double t;
};

/// Alignment level cannot be reached by a trajectory (above its equilibrium c1).
class UnreachableLevelError : public Error {
public:
    using Error::Error;
};

/// More eigenmodes requested than the kernel representation exposes.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Requested prevalence at or beyond the saturation value of the SI curve.
class SaturationError : public Error {
public:
    using Error::Error;
};

/// Trajectory too short for the requested alignment horizon or crossing.
class InsufficientHorizonError : public Error {
public:
    using Error::Error;
};

} // namespace gsis
