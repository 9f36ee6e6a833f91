#pragma once

#include <stdexcept>
#include <string>

namespace maxreg {

/// Bad input: violated precondition, malformed config, inadmissible exponent.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation ran but produced something unusable (NaN, singular solve, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace maxreg
