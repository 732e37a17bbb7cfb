#pragma once

#include <stdexcept>
#include <string>

namespace cbrw {

// Invalid user input (config file, parameter range). The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-convergence, unstable truncation, all trials censored.
// The CLI maps this to exit code 3.
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cbrw
