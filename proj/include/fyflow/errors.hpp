#pragma once

#include <stdexcept>
#include <string>

namespace fyflow {

/// Iterative solver failed to reach its tolerance; carries the last residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

} // namespace fyflow
