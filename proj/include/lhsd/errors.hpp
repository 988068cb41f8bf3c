#pragma once

#include <stdexcept>
#include <string>

namespace lhsd {

// Thrown when a numerical safeguard trips (quadrature refinement check,
// evaluation budget, log-argument domain, inversion failure).
class numerical_guard_error : public std::runtime_error {
public:
    explicit numerical_guard_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lhsd
