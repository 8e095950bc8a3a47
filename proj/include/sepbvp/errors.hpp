#pragma once

#include <stdexcept>
#include <string>

namespace sepbvp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument fell outside the domain of the operation (e.g. t outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

class NegativeCoefficient : public Error {
public:
    using Error::Error;
};

/// Gamma = gamma*beta + alpha*gamma + alpha*delta vanished.
class DegenerateGamma : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class MaxDepthExceeded : public QuadratureError {
public:
    using QuadratureError::QuadratureError;
};

class NonFiniteIntegrand : public QuadratureError {
public:
    using QuadratureError::QuadratureError;
};

/// A function handed to the operator T lies outside the closed ball of radius R.
class BallViolation : public Error {
public:
    using Error::Error;
};

/// Frank-Wolfe did not reach the requested duality gap.
class SolverStall : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace sepbvp
