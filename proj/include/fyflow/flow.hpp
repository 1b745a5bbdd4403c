#pragma once

#include "fyflow/field.hpp"
#include "fyflow/params.hpp"
#include "fyflow/resolvent.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fyflow {

/// State of the un-rescaled flow d/dt u = -P_gamma(u^m): the density u >= 0
/// at time t. The conformal factor is the derived quantity w = u^m.
struct FlowState {
    double t = 0.0;
    Field density;

    Field conformal_factor(const FlowParams& params) const;
};

struct TraceRecord {
    double t;
    double mass;             // int u
    double volume;           // int u^((N+1)/N) = int w^(N+1)
    double sup;              // sup u
    double inf;              // inf u
    double harnack_quotient; // sup(w)/inf(w)
    double dirichlet_energy; // int w * P_gamma w
};

/// Diagnostic scalars of a state (the trace row for it).
TraceRecord trace_record(const FlowState& s, const FlowParams& params);

/// Time series of diagnostic scalars along a run; times strictly increase.
struct FlowTrace {
    std::vector<TraceRecord> records;
    bool extinguished = false;
    double extinction_time = 0.0;
};

/// Sampled time-change data: unrescaled time tau, rescaled time t and the
/// normalization exponent F with e^F = mass(0)/mass(tau).
struct RescaleMap {
    std::vector<double> tau;
    std::vector<double> t;
    std::vector<double> F;
};

struct FlowRunOptions {
    int record_stride = 1;
    /// Extinction when sup(u) < threshold * sup(u0).
    double extinction_threshold = 1e-8;
    /// Halve the step (at most `max_halvings` times) whenever one step drops
    /// the mass by more than 20%, to resolve the extinction time.
    bool adapt_near_extinction = true;
    int max_halvings = 24;
    /// Keep the density snapshot of every recorded time (needed for the
    /// time-change rescaling).
    bool keep_fields = false;
};

struct FlowRun {
    FlowTrace trace;
    std::vector<std::pair<double, Field>> fields; // recorded (t, density)
    FlowState final_state;
    /// Nonlocal coefficient samples q(t_k) (rescaled direct runs only).
    std::vector<double> q_samples;
};

/// One Crandall-Liggett step of the un-rescaled flow: solve
/// h*P_gamma(w) + w^N = u and advance density to w^N. Mass is conserved to
/// solver tolerance when q_c = 0.
FlowState step_unrescaled(const FlowState& state, const FlowParams& params, double h);

FlowRun run_unrescaled(const FlowState& initial, const FlowParams& params,
                       double h, double t_end, const FlowRunOptions& opts = {});

/// Closed-form extinction time of constant data under positive curvature:
/// conformal factor w0 gives T* = N * w0^(N-1) / (q_c * (N-1)).
double extinction_time_constant(double w0, double q_c, double N);

struct ExtinctionReport {
    bool extinct = false;
    double time = 0.0;
    double horizon = 0.0;
};

/// Run until extinction (requires q_c > 0); reports whether it occurred
/// before the horizon and when.
ExtinctionReport extinction_remark_check(const FlowState& initial,
                                         const FlowParams& params, double h,
                                         double horizon);

struct RescaledTrajectory {
    std::vector<double> t;
    std::vector<Field> v;
    RescaleMap map;
};

/// Rescale an un-rescaled trajectory u(.,tau) by the mass normalization
/// e^F(tau) = const / int u(.,tau): v = e^F * u on the new time grid obtained
/// by integrating dt/dtau = e^(F*(1/N - 1)) with the composite trapezoid
/// rule. int v is constant by construction and t(tau) strictly increases.
/// Throws if the mass is not strictly positive on the whole range.
RescaledTrajectory rescale_via_time_change(
    const std::vector<std::pair<double, Field>>& snapshots,
    const FlowParams& params);

/// Nonlocal coefficient of the volume-preserving flow at conformal factor w,
/// q(t) = int w*P_gamma(w) / int w^(N+1).
double rescaled_coefficient(const Field& w, const FlowParams& params);

/// One semi-implicit step of the volume-preserving flow: diffusion resolvent,
/// scalar reaction by exp(q*h/N), then exact renormalization of w to the
/// reference volume. Returns the new state and the q(t) sample.
std::pair<FlowState, double> step_rescaled_direct(const FlowState& state,
                                                  const FlowParams& params,
                                                  double h, double volume_ref);

FlowRun run_rescaled_direct(const FlowState& initial, const FlowParams& params,
                            double h, double t_end, const FlowRunOptions& opts = {});

/// Space-free mode of the same implicit scheme for d/dt U^N = -sign * U.
/// sign = +1 is the positive-curvature decay/extinction ODE. sign = -1 is
/// integrated as d/dt U^N = +U: the growing branch
/// U = ((N-1)/N)^(1/(N-1)) * t^(1/(N-1)) solves that equation, while the
/// sign as written admits no growing positive solution; from U0 = 0 the
/// problem has two solutions and the scheme selects one branch.
struct OdeTrajectory {
    std::vector<double> t;
    std::vector<double> u; // conformal-factor variable U
    bool extinct = false;
    double extinction_time = 0.0;
};

OdeTrajectory ode_mode(double N, int q_sign, double u0, double h, double t_end);

enum class OdeBranch { trivial, nontrivial, neither };

/// Classify a sign = -1, U0 = 0 trajectory against the two exact branches
/// U == 0 and U = ((N-1)/N)^(1/(N-1)) * t^(1/(N-1)).
OdeBranch classify_ode_branch(const OdeTrajectory& traj, double N, double tol = 1e-6);

/// Value of the nontrivial branch at time t.
double ode_nontrivial_branch(double t, double N);

/// Scalar resolvent h*q*w + w^N = g (the constant-data specialization shared
/// with the PDE stepper); for q < 0 Newton starts from g^(1/N), which selects
/// the trivial root at g = 0.
double scalar_resolvent(double g, double h, double q, double N);

const char* to_string(OdeBranch b);

} // namespace fyflow
