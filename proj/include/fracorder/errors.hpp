#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracorder {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A denominator or logarithm argument collapsed to zero (the
/// non-identifiable case where the leading drift vanishes).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

/// Nonlinear solve failed at a time node.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string &what, std::size_t node)
        : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fracorder
