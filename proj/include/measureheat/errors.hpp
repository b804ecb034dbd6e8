#pragma once

#include <stdexcept>
#include <string>

namespace mheat {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition on a public entry point.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Rejected experiment configuration (bad key, bad value, inconsistent specs).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Coefficient field whose symmetric part fails the coercivity bound.
class NonEllipticError : public Error {
public:
    using Error::Error;
};

/// Linear or eigenvalue solve did not reach its residual target.
class SolveError : public Error {
public:
    SolveError(const std::string& what, double final_residual, long iterations)
        : Error(what), final_residual(final_residual), iterations(iterations) {}

    double final_residual;
    long iterations;
};

}  // namespace mheat
