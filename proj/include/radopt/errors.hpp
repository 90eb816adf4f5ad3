#ifndef RADOPT_ERRORS_HPP
#define RADOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace radopt {

// Bad user input: malformed config, infeasible constraint, unknown model name.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model hypothesis required by the requested operation does not hold
// (e.g. nonnegative divergence where a negative bound is needed).
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure inside the time integrator or a linear solve.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace radopt

#endif
