#pragma once

#include <stdexcept>
#include <string>

namespace dephase {

/// Invalid configuration, grid or initial datum. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Initial datum that does not define a probability density.
class DatumError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// NaN, overflow or a singular step. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An inequality that must hold exactly was violated; indicates a bug.
class InequalityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace dephase
