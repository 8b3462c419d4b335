#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpc {

/// Rejected input: dimension mismatch, malformed kernel, bad file contents.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent run configuration (step size outside the admissible
/// interval, schedule target different from the problem's λ, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A non-finite value appeared during an iteration.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& msg, std::size_t index)
        : std::runtime_error(msg), index_(index) {}

    /// Coordinate at which the first non-finite entry was found.
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Objective grew by more than the divergence factor relative to F(u0).
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& msg, std::size_t iteration)
        : std::runtime_error(msg), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Iterative estimate did not settle within its budget.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& msg, double last_estimate)
        : std::runtime_error(msg), last_estimate_(last_estimate) {}

    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

}  // namespace fpc
