#pragma once

#include <stdexcept>
#include <string>

namespace tfop {

// Bad user input: malformed config, dimension mismatch, invalid exponent.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: NaN input, degenerate phase, fitness-gate violation,
// ill-conditioned Gram.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tfop
