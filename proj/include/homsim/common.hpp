#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace homsim {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Bad user input: malformed config, inconsistent dimensions, modes that do not
// fit the grid. Maps to exit code 2 at the CLI boundary.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Algorithmic failure: non-convergence, loss of orthonormality, singular
// systems. Maps to exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace homsim
