#pragma once

#include "fyflow/fft.hpp"
#include "fyflow/params.hpp"

namespace fyflow {

/// (-Delta)^gamma f: Fourier multiplier |xi|^(2*gamma). The zero mode is
/// annihilated, so the image always has zero mean. Requires gamma in (0,1).
Field fractional_laplacian(const Field& f, double gamma);

/// P_gamma f = (-Delta)^gamma f + q_c * f. Applied to the constant 1 this
/// returns the constant q_c (the model curvature).
Field conformal_operator(const Field& f, const FlowParams& params);

/// integral(w * P_gamma w); the quadratic form of the operator.
double dirichlet_energy(const Field& w, const FlowParams& params);

/// Multiplier array (|xi|^2)^gamma + q_c per flattened mode, the spectral
/// realization of P_gamma used by the solvers.
std::vector<double> conformal_multiplier(const Grid& grid, double gamma, double q_c);

} // namespace fyflow
