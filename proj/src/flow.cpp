#include "fyflow/flow.hpp"

#include "fyflow/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fyflow {

Field FlowState::conformal_factor(const FlowParams& params) const {
    return pow_plus(density, params.m_gamma());
}

TraceRecord trace_record(const FlowState& s, const FlowParams& params) {
    const double N = params.N_gamma();
    const Field w = s.conformal_factor(params);
    const double wi = inf(w);
    TraceRecord r;
    r.t = s.t;
    r.mass = integral(s.density);
    r.volume = integral(pow_plus(s.density, (N + 1.0) / N));
    r.sup = sup(s.density);
    r.inf = inf(s.density);
    r.harnack_quotient =
        wi > 0.0 ? sup(w) / wi : std::numeric_limits<double>::infinity();
    r.dirichlet_energy = dirichlet_energy(w, params);
    return r;
}

namespace {

constexpr std::size_t kStepBudget = 10'000'000;

} // namespace

FlowState step_unrescaled(const FlowState& state, const FlowParams& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    const ResolventProblem prob(state.density, params, h);
    ResolventSolution sol = solve_resolvent(prob);
    return {state.t + h, pow_plus(sol.w, params.N_gamma())};
}

FlowRun run_unrescaled(const FlowState& initial, const FlowParams& params,
                       double h, double t_end, const FlowRunOptions& opts) {
    params.validate();
    if (!(t_end > initial.t)) throw std::invalid_argument("t_end must exceed start time");

    FlowRun run{{}, {}, initial, {}};
    auto record = [&](const FlowState& s) {
        run.trace.records.push_back(trace_record(s, params));
        if (opts.keep_fields) run.fields.emplace_back(s.t, s.density);
    };

    FlowState state = initial;
    record(state);

    const double sup0 = sup(state.density);
    if (sup0 <= 0.0) {
        run.trace.extinguished = true;
        run.trace.extinction_time = state.t;
        run.final_state = state;
        return run;
    }

    double h_cur = h;
    int halvings = 0;
    std::size_t step = 0;
    while (state.t < t_end - 1e-12 * std::max(1.0, t_end)) {
        if (++step > kStepBudget)
            throw SolverError("flow exceeded its step budget", 0.0, static_cast<int>(step));
        const double prev_mass = integral(state.density);
        FlowState next = step_unrescaled(state, params, h_cur);
        if (opts.adapt_near_extinction && halvings < opts.max_halvings &&
            integral(next.density) < 0.8 * prev_mass) {
            h_cur *= 0.5;
            ++halvings;
            continue; // retry the step at the finer resolution
        }
        state = std::move(next);
        const bool extinct = sup(state.density) < opts.extinction_threshold * sup0;
        if (extinct || step % static_cast<std::size_t>(opts.record_stride) == 0 ||
            state.t >= t_end - 1e-12 * std::max(1.0, t_end))
            record(state);
        if (extinct) {
            run.trace.extinguished = true;
            run.trace.extinction_time = state.t;
            break;
        }
    }
    run.final_state = state;
    return run;
}

double extinction_time_constant(double w0, double q_c, double N) {
    if (!(q_c > 0.0)) throw std::invalid_argument("extinction requires q_c > 0");
    return N * std::pow(w0, N - 1.0) / (q_c * (N - 1.0));
}

ExtinctionReport extinction_remark_check(const FlowState& initial,
                                         const FlowParams& params, double h,
                                         double horizon) {
    if (!(params.q_c > 0.0))
        throw std::invalid_argument("extinction check requires q_c > 0");
    FlowRunOptions opts;
    opts.record_stride = 1 << 20; // scalars only at the ends
    FlowRun run = run_unrescaled(initial, params, h, horizon, opts);
    return {run.trace.extinguished, run.trace.extinction_time, horizon};
}

RescaledTrajectory rescale_via_time_change(
    const std::vector<std::pair<double, Field>>& snapshots,
    const FlowParams& params) {
    if (snapshots.size() < 2)
        throw std::invalid_argument("rescaling needs at least two snapshots");
    const double N = params.N_gamma();

    RescaledTrajectory out;
    const std::size_t K = snapshots.size();
    out.map.tau.resize(K);
    out.map.t.resize(K);
    out.map.F.resize(K);
    out.t.resize(K);
    out.v.reserve(K);

    const double mass0 = integral(snapshots.front().second);
    std::vector<double> psi(K);
    for (std::size_t k = 0; k < K; ++k) {
        out.map.tau[k] = snapshots[k].first;
        if (k > 0 && !(out.map.tau[k] > out.map.tau[k - 1]))
            throw std::invalid_argument("snapshot times must increase strictly");
        const double mass = integral(snapshots[k].second);
        if (!(mass > 0.0))
            throw std::invalid_argument(
                "rescaling undefined past extinction: mass reached zero");
        const double eF = mass0 / mass;
        out.map.F[k] = std::log(eF);
        // dt/dtau = e^(F*(1/N - 1))
        psi[k] = std::pow(eF, 1.0 / N - 1.0);
        out.v.push_back(eF * snapshots[k].second);
    }
    out.map.t[0] = 0.0;
    for (std::size_t k = 1; k < K; ++k)
        out.map.t[k] = out.map.t[k - 1] +
                       (out.map.tau[k] - out.map.tau[k - 1]) * 0.5 * (psi[k - 1] + psi[k]);
    out.t = out.map.t;
    return out;
}

double rescaled_coefficient(const Field& w, const FlowParams& params) {
    const double vol = integral(pow_plus(w, params.N_gamma() + 1.0));
    if (!(vol > 0.0)) throw std::invalid_argument("vanishing volume");
    return dirichlet_energy(w, params) / vol;
}

std::pair<FlowState, double> step_rescaled_direct(const FlowState& state,
                                                  const FlowParams& params,
                                                  double h, double volume_ref) {
    const double N = params.N_gamma();
    const ResolventProblem prob(state.density, params, h);
    Field w = solve_resolvent(prob).w;

    const double q = rescaled_coefficient(w, params);
    const double reaction = std::exp(q * h / N);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= reaction;

    // exact volume renormalization removes the splitting drift
    const double vol = integral(pow_plus(w, N + 1.0));
    if (!(vol > 0.0)) throw std::invalid_argument("vanishing volume");
    const double scale = std::pow(volume_ref / vol, 1.0 / (N + 1.0));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= scale;

    return {FlowState{state.t + h, pow_plus(w, N)}, q};
}

FlowRun run_rescaled_direct(const FlowState& initial, const FlowParams& params,
                            double h, double t_end, const FlowRunOptions& opts) {
    params.validate();
    if (!(t_end > initial.t)) throw std::invalid_argument("t_end must exceed start time");
    if (!(inf(initial.density) >= 0.0) || sup(initial.density) <= 0.0)
        throw std::invalid_argument("rescaled flow needs nonnegative, nonzero data");

    const double N = params.N_gamma();
    const double volume_ref = integral(pow_plus(initial.density, (N + 1.0) / N));

    FlowRun run{{}, {}, initial, {}};
    auto record = [&](const FlowState& s) {
        run.trace.records.push_back(trace_record(s, params));
        if (opts.keep_fields) run.fields.emplace_back(s.t, s.density);
    };
    FlowState state = initial;
    record(state);

    std::size_t step = 0;
    while (state.t < t_end - 1e-12 * std::max(1.0, t_end)) {
        if (++step > kStepBudget)
            throw SolverError("flow exceeded its step budget", 0.0, static_cast<int>(step));
        auto [next, q] = step_rescaled_direct(state, params, h, volume_ref);
        state = std::move(next);
        run.q_samples.push_back(q);
        if (step % static_cast<std::size_t>(opts.record_stride) == 0 ||
            state.t >= t_end - 1e-12 * std::max(1.0, t_end))
            record(state);
    }
    run.final_state = state;
    return run;
}

double scalar_resolvent(double g, double h, double q, double N) {
    if (g < 0.0) throw std::invalid_argument("scalar resolvent data must be nonnegative");
    double w = g > 0.0 ? std::pow(g, 1.0 / N) : 0.0;
    auto f = [&](double v) {
        return h * q * v + (v > 0.0 ? std::pow(v, N) : 0.0) - g;
    };
    auto df = [&](double v) {
        return h * q + (v > 0.0 ? N * std::pow(v, N - 1.0) : 0.0);
    };
    if (f(w) == 0.0) return w; // includes the g = 0 trivial branch

    if (q >= 0.0) {
        // f increasing and convex on [0, inf); root in [0, g^(1/N)]
        for (int it = 0; it < 200; ++it) {
            const double fv = f(w);
            if (std::abs(fv) <= 1e-15 * std::max(1.0, g)) break;
            double step = fv / df(w);
            double w2 = w - step;
            if (w2 < 0.0) w2 = 0.5 * w;
            if (w2 == w) break;
            w = w2;
        }
        return std::max(w, 0.0);
    }

    // q < 0: f(w) = w^N - h|q|w - g with f(g^(1/N)) <= 0; bracket upward,
    // then bisect with Newton polishing.
    double lo = w;
    double hi = std::max({w, std::pow(h * -q, 1.0 / (N - 1.0)), 1e-8});
    while (f(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-15 * std::max(1.0, g) || hi - lo <= 1e-16 * hi) {
            lo = hi = mid;
            break;
        }
        (fm < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

OdeTrajectory ode_mode(double N, int q_sign, double u0, double h, double t_end) {
    if (!(N > 1.0)) throw std::invalid_argument("ode exponent N must exceed 1");
    if (q_sign != 1 && q_sign != -1) throw std::invalid_argument("q_sign must be +-1");
    if (u0 < 0.0) throw std::invalid_argument("u0 must be nonnegative");
    if (!(h > 0.0 && t_end > 0.0)) throw std::invalid_argument("h and t_end must be positive");

    OdeTrajectory traj;
    double t = 0.0;
    double dens = std::pow(u0, N);
    const double dens0 = dens;
    traj.t.push_back(0.0);
    traj.u.push_back(u0);
    while (t < t_end - 1e-12 * t_end) {
        const double w = scalar_resolvent(dens, h, static_cast<double>(q_sign), N);
        dens = std::pow(w, N);
        t += h;
        traj.t.push_back(t);
        traj.u.push_back(w);
        if (q_sign > 0 && dens0 > 0.0 && dens < 1e-8 * dens0) {
            traj.extinct = true;
            traj.extinction_time = t;
            break;
        }
    }
    return traj;
}

double ode_nontrivial_branch(double t, double N) {
    return std::pow((N - 1.0) / N, 1.0 / (N - 1.0)) * std::pow(t, 1.0 / (N - 1.0));
}

OdeBranch classify_ode_branch(const OdeTrajectory& traj, double N, double tol) {
    double err_trivial = 0.0, err_branch = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const double b = ode_nontrivial_branch(traj.t[k], N);
        err_trivial = std::max(err_trivial, std::abs(traj.u[k]));
        err_branch = std::max(err_branch, std::abs(traj.u[k] - b));
        scale = std::max(scale, b);
    }
    if (err_trivial <= tol * std::max(1.0, scale)) return OdeBranch::trivial;
    if (err_branch <= tol * std::max(1.0, scale)) return OdeBranch::nontrivial;
    return OdeBranch::neither;
}

const char* to_string(OdeBranch b) {
    switch (b) {
        case OdeBranch::trivial: return "trivial";
        case OdeBranch::nontrivial: return "nontrivial";
        default: return "neither";
    }
}

} // namespace fyflow
