#pragma once

namespace fyflow {

/// Flow parameters. gamma is the operator order, n the analytic dimension
/// entering the exponents, q_c >= 0 the constant curvature term of
/// P_gamma = (-Delta)^gamma + q_c. The fast-diffusion exponents are derived:
/// N_gamma = (n+2*gamma)/(n-2*gamma) > 1 and m_gamma = 1/N_gamma in (0,1).
struct FlowParams {
    double gamma = 0.5;
    int n = 3;
    double q_c = 0.0;
    double h = 0.01;
    double tol_resolvent = 1e-10;
    int max_iter = 200;

    double N_gamma() const { return (n + 2.0 * gamma) / (n - 2.0 * gamma); }
    double m_gamma() const { return 1.0 / N_gamma(); }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

} // namespace fyflow
