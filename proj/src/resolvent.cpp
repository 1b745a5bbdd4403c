#include "fyflow/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fyflow {

namespace {

struct Workspace {
    std::vector<double> op_multiplier;  // (|xi|^2)^gamma + q_c
    double N;
    double h;
    double dV;

    Field apply_P(const Field& w) const { return apply_multiplier(w, op_multiplier); }

    Field residual(const Field& w, const Field& g) const {
        Field r = apply_P(w);
        const double n = N;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double wp = w[i] > 0.0 ? std::pow(w[i], n) : 0.0;
            r[i] = h * r[i] + wp - g[i];
        }
        return r;
    }

    double objective(const Field& w, const Field& g) const {
        const Field Pw = apply_P(w);
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double wp = w[i] > 0.0 ? std::pow(w[i], N + 1.0) : 0.0;
            s += 0.5 * h * w[i] * Pw[i] + wp / (N + 1.0) - w[i] * g[i];
        }
        return s * dV;
    }
};

double l2(const Field& f) { return lp_norm(f, 2.0); }

} // namespace

double objective_J(const Field& w, const ResolventProblem& prob) {
    prob.params.validate();
    require_same_grid(w, prob.g, "objective_J");
    Workspace ws{conformal_multiplier(w.grid(), prob.params.gamma, prob.params.q_c),
                 prob.params.N_gamma(), prob.h, w.grid().cell_volume()};
    return ws.objective(w, prob.g);
}

Field objective_gradient(const Field& w, const ResolventProblem& prob) {
    prob.params.validate();
    require_same_grid(w, prob.g, "objective_gradient");
    Workspace ws{conformal_multiplier(w.grid(), prob.params.gamma, prob.params.q_c),
                 prob.params.N_gamma(), prob.h, w.grid().cell_volume()};
    return ws.residual(w, prob.g);
}

ResolventSolution solve_resolvent(const ResolventProblem& prob,
                                  const ResolventOptions& opts) {
    prob.params.validate();
    if (!(prob.h > 0.0)) throw std::invalid_argument("resolvent step h must be positive");
    const Field& g = prob.g;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] < 0.0)
            throw std::invalid_argument("resolvent data g must be nonnegative");

    const double N = prob.params.N_gamma();
    const Grid& grid = g.grid();
    Workspace ws{conformal_multiplier(grid, prob.params.gamma, prob.params.q_c), N,
                 prob.h, grid.cell_volume()};

    const double gnorm = l2(g);
    if (gnorm == 0.0) {
        // unique minimizer of the coercive objective with zero data
        return {Field(grid, 0.0), 0.0, 0, 0.0};
    }

    Field w = opts.initial_iterate ? *opts.initial_iterate : pow_plus(g, 1.0 / N);
    require_same_grid(w, g, "solve_resolvent initial iterate");

    const double tol = prob.params.tol_resolvent;
    const std::size_t P = g.size();
    double relres = 0.0;
    int iter = 0;

    for (iter = 0; iter < prob.params.max_iter; ++iter) {
        Field r = ws.residual(w, g);
        relres = l2(r) / gnorm;
        if (opts.observer)
            opts.observer({iter, ws.objective(w, g), relres, iter == 0 ? 0.0 : 1.0});
        if (relres <= tol) break;

        // Newton direction from PCG on (h*P_gamma + N*diag(w_+^(N-1))) d = -r,
        // preconditioned by the Fourier surrogate with the diagonal replaced
        // by its maximum.
        std::vector<double> diag(P);
        double cd = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            diag[i] = w[i] > 0.0 ? N * std::pow(w[i], N - 1.0) : 0.0;
            cd = std::max(cd, diag[i]);
        }
        cd = std::max(cd, 1e-30);
        std::vector<double> pre(ws.op_multiplier.size());
        for (std::size_t i = 0; i < pre.size(); ++i)
            pre[i] = 1.0 / (prob.h * ws.op_multiplier[i] + cd);

        auto apply_H = [&](const Field& v) {
            Field out = apply_multiplier(v, ws.op_multiplier);
            for (std::size_t i = 0; i < P; ++i) out[i] = prob.h * out[i] + diag[i] * v[i];
            return out;
        };

        Field d(grid, 0.0);
        {
            Field res = -1.0 * r;
            Field z = apply_multiplier(res, pre);
            Field p = z;
            double rz = inner(res, z);
            const double bn = l2(res);
            for (int cg = 0; cg < 200; ++cg) {
                Field Hp = apply_H(p);
                const double alpha = rz / inner(p, Hp);
                axpy(d, alpha, p);
                axpy(res, -alpha, Hp);
                if (l2(res) <= 1e-4 * bn) break;
                z = apply_multiplier(res, pre);
                const double rz2 = inner(res, z);
                p = z + (rz2 / rz) * p;
                rz = rz2;
            }
        }

        // Backtracking acceptance: Armijo on J, or a measurable drop of the
        // residual norm (J differences vanish in round-off near the
        // minimizer long before the residual tolerance is reached).
        const double J0 = ws.objective(w, g);
        const double rnorm = l2(r);
        auto try_direction = [&](const Field& dir, int max_backtracks) {
            const double slope = inner(r, dir);
            if (!(slope < 0.0)) return false;
            double t = 1.0;
            for (int bt = 0; bt < max_backtracks; ++bt, t *= 0.5) {
                Field trial = w;
                axpy(trial, t, dir);
                const bool armijo = ws.objective(trial, g) <= J0 + 1e-4 * t * slope;
                const bool residual_drop =
                    l2(ws.residual(trial, g)) <= (1.0 - 1e-4 * t) * rnorm;
                if (armijo || residual_drop) {
                    w = std::move(trial);
                    return true;
                }
            }
            return false;
        };

        bool accepted = try_direction(d, 40);
        if (!accepted) {
            const Field ds = -1.0 * apply_multiplier(r, pre);
            accepted = try_direction(ds, 60);
        }
        if (!accepted)
            throw SolverError("resolvent line search stalled at relative residual " +
                                  std::to_string(relres),
                              relres, iter);
    }

    if (relres > prob.params.tol_resolvent)
        throw SolverError("resolvent did not converge: relative residual " +
                              std::to_string(relres),
                          relres, iter);

    // w >= 0 up to round-off; anything below -1e-12 is a solver failure.
    for (std::size_t i = 0; i < P; ++i) {
        if (w[i] < 0.0) {
            if (w[i] <= -1e-12)
                throw SolverError("resolvent produced a negative value " +
                                      std::to_string(inf(w)),
                                  relres, iter);
            w[i] = 0.0;
        }
    }

    return {w, relres, iter, objective_J(w, prob)};
}

TContractionPair check_t_contraction(const Field& g1, const Field& g2,
                                     const FlowParams& params, double h) {
    require_same_grid(g1, g2, "check_t_contraction");
    const double N = params.N_gamma();
    const ResolventProblem p1(g1, params, h), p2(g2, params, h);
    const Field w1 = solve_resolvent(p1).w;
    const Field w2 = solve_resolvent(p2).w;

    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        lhs += h * params.q_c * std::max(w1[i] - w2[i], 0.0) +
               std::max(std::pow(w1[i], N) - std::pow(w2[i], N), 0.0);
        rhs += std::max(g1[i] - g2[i], 0.0);
    }
    const double dV = g1.grid().cell_volume();
    return {lhs * dV, rhs * dV};
}

} // namespace fyflow
