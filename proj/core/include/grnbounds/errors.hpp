#pragma once

#include <stdexcept>
#include <string>

namespace grnbounds {

// Precondition and dimension violations are reported as std::invalid_argument.
// NumericalError covers failures that only show up while computing: NaNs in a
// solve, runaway SSA propensities, a root finder that did not converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace grnbounds
