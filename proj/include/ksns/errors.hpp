#pragma once

#include <stdexcept>
#include <string>

namespace ksns {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input to an offline routine (series, lists, resolutions).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Point evaluation outside the admissible set, e.g. negative density.
class DomainError : public Error {
public:
    using Error::Error;
};

class SolverDivergence : public Error {
public:
    SolverDivergence(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A time step that cannot be taken with the requested dt (CFL violation).
class StepRejected : public Error {
public:
    StepRejected(const std::string& what, double dt_limit)
        : Error(what), dt_limit_(dt_limit) {}

    /// Largest dt the failing check would have accepted.
    double dt_limit() const { return dt_limit_; }

private:
    double dt_limit_;
};

class PositivityFailure : public Error {
public:
    PositivityFailure(const std::string& what, double minimum)
        : Error(what), minimum_(minimum) {}

    double minimum() const { return minimum_; }

private:
    double minimum_;
};

class NumericalBreakdown : public Error {
public:
    NumericalBreakdown(const std::string& field)
        : Error("non-finite value in " + field), field_(field) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : Error(field + ": " + message), field_(field) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace ksns
