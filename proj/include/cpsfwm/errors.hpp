#pragma once

#include <stdexcept>
#include <string>

namespace cpsfwm {

/// Malformed or inconsistent user input (config files, CLI flags).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative procedure did not reach its tolerance. Carries the residual
/// that was achieved so callers can report it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The request is outside the physics the model covers.
class PhysicsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A fiber mode is below cutoff at the requested frequency.
class ModeNotGuided : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// A pump combination the model does not treat (e.g. two monochromatic pumps).
class UnsupportedConfiguration : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

}  // namespace cpsfwm
