#pragma once

#include <stdexcept>
#include <string>

namespace magbot {

// Numerical routine failed to converge or hit a degenerate system.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int step = -1)
        : std::runtime_error(what), step_(step) {}
    int step_index() const { return step_; }

private:
    int step_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An interlock refused the request (coercivity gate, activation threshold, coil limits).
class SafetyRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace magbot
