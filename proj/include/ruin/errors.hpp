#pragma once

#include <stdexcept>
#include <string>

namespace ruin {

/// Base class for all solver errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model parameters violate a required inequality.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an evaluator.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE integration failed (step control stalled or sign constraint broken).
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// A bracketed root could not be located.
class RootError : public Error {
public:
    using Error::Error;
};

/// Monotone inversion of the dual marginal failed.
class InversionError : public Error {
public:
    using Error::Error;
};

/// No (or more than one) case condition fired when selecting a power exponent.
class CaseSelectionError : public Error {
public:
    using Error::Error;
};

/// Invalid simulation configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An allocation rule returned an infeasible value for the active regime.
class StrategyError : public Error {
public:
    using Error::Error;
};

} // namespace ruin
