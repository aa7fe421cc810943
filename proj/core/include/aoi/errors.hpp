#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Raised when an SHS model, parameter set, or simulation config is malformed.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a linear solve is singular, ill-conditioned, or fails its
/// post-solve residual / sign checks.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aoi
