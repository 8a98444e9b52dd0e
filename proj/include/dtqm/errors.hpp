#pragma once

#include <stdexcept>
#include <string>

namespace dtqm {

// Invalid input to an operation (bad grid, wrong action kind, too few samples).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical procedure (root finding, calibration) could not deliver a result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dtqm
