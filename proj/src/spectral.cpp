#include "fyflow/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fyflow {

std::vector<double> conformal_multiplier(const Grid& grid, double gamma, double q_c) {
    std::vector<double> mult = symbol_xi_squared(grid);
    for (double& m : mult) m = std::pow(m, gamma) + q_c;
    return mult;
}

Field fractional_laplacian(const Field& f, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    return apply_multiplier(f, conformal_multiplier(f.grid(), gamma, 0.0));
}

Field conformal_operator(const Field& f, const FlowParams& params) {
    params.validate();
    return apply_multiplier(f, conformal_multiplier(f.grid(), params.gamma, params.q_c));
}

double dirichlet_energy(const Field& w, const FlowParams& params) {
    return inner(w, conformal_operator(w, params));
}

} // namespace fyflow
