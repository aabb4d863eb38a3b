#pragma once

#include <stdexcept>
#include <string>

namespace mesodrop {

/// Invalid user-supplied parameters (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its contract (maps to CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by well analysis when the potential has no interior minimum on the bracket.
class NoMinimumError : public NumericError {
public:
    using NumericError::NumericError;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) throw ConfigError(message);
}

} // namespace mesodrop
