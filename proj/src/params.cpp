#include "fyflow/params.hpp"

#include <stdexcept>
#include <string>

namespace fyflow {

void FlowParams::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("n must be a positive integer");
    if (!(n > 2.0 * gamma))
        throw std::invalid_argument("n must exceed 2*gamma (got n = " + std::to_string(n) +
                                    ", gamma = " + std::to_string(gamma) + ")");
    if (q_c < 0.0) throw std::invalid_argument("q_c must be nonnegative");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    if (!(tol_resolvent > 0.0))
        throw std::invalid_argument("tol_resolvent must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

} // namespace fyflow
