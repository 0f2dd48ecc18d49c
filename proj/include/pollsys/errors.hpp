#pragma once

#include <stdexcept>

namespace pollsys {

// Bad input: malformed config, parameter out of domain, unstable system.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Computation failed: iteration cap hit, bracket not found, order above cap.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pollsys
