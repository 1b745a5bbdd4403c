#pragma once

#include "fyflow/errors.hpp"
#include "fyflow/field.hpp"
#include "fyflow/params.hpp"
#include "fyflow/spectral.hpp"

#include <functional>

namespace fyflow {

/// One implicit-time-discretization step written as the elliptic problem
///   h * P_gamma(w) + w^N = g,   w >= 0,
/// for the conformal factor w, with g >= 0 the previous density.
struct ResolventProblem {
    Field g;
    FlowParams params;
    double h;

    ResolventProblem(Field g_, FlowParams params_)
        : g(std::move(g_)), params(params_), h(params_.h) {}
    ResolventProblem(Field g_, FlowParams params_, double h_)
        : g(std::move(g_)), params(params_), h(h_) {}
};

struct ResolventSolution {
    Field w;
    double residual_norm = 0.0; // relative to ||g||_2
    int iterations = 0;
    double objective = 0.0;
};

struct ResolventIteration {
    int iteration;
    double objective;
    double residual;
    double step_length;
};

struct ResolventOptions {
    /// Override the default initial iterate w0 = g^(1/N).
    const Field* initial_iterate = nullptr;
    /// Called once per outer iteration (solver diagnostics stream).
    std::function<void(const ResolventIteration&)> observer;
};

/// Value of the strictly convex objective
///   J(w) = (h/2) * int w*P_gamma(w) + 1/(N+1) * int (w_+)^(N+1) - int w*g,
/// whose minimizer solves the resolvent equation. The power term is extended
/// by w -> (w_+)^N off the nonnegative cone.
double objective_J(const Field& w, const ResolventProblem& prob);

/// L2 gradient of J at w: h*P_gamma(w) + (w_+)^N - g.
Field objective_gradient(const Field& w, const ResolventProblem& prob);

/// Damped Newton on J with the Fourier preconditioner
/// (h*|xi|^(2*gamma) + h*q_c + N*max(w_+)^(N-1))^-1, falling back to
/// preconditioned gradient descent when a Newton step fails to decrease J.
/// Stops when ||h*P_gamma(w) + w^N - g||_2 <= tol_resolvent * ||g||_2.
/// Throws std::invalid_argument for negative data and SolverError on
/// non-convergence. g identically zero short-circuits to w = 0.
ResolventSolution solve_resolvent(const ResolventProblem& prob,
                                  const ResolventOptions& opts = {});

/// Both sides of the T-contraction inequality for data g1, g2:
///   lhs = h*q_c*int (w1-w2)_+ + int (w1^N - w2^N)_+,
///   rhs = int (g1-g2)_+.
/// The module contract is lhs <= rhs up to solver tolerance.
struct TContractionPair {
    double lhs;
    double rhs;
};

TContractionPair check_t_contraction(const Field& g1, const Field& g2,
                                     const FlowParams& params, double h);

} // namespace fyflow
