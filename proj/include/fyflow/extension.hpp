#pragma once

#include "fyflow/field.hpp"
#include "fyflow/rng.hpp"

#include <cstdint>
#include <vector>

namespace fyflow {

/// Graded tensor mesh on the half-cylinder base x [0, y_max] carrying the
/// degenerate weight y^a, a = 1 - 2*gamma in (-1,1). y_nodes start at 0 and
/// increase strictly; the default grading y_j = y_max*(j/J)^beta clusters
/// nodes toward y = 0 where the weighted flux limit lives.
class ExtensionMesh {
public:
    static ExtensionMesh graded(const Grid& base, double gamma, int levels,
                                double beta = 2.0, double y_max = 4.0);
    static ExtensionMesh from_nodes(const Grid& base, double gamma,
                                    std::vector<double> y_nodes);

    const Grid& base() const { return base_; }
    double gamma() const { return gamma_; }
    /// Weight exponent a = 1 - 2*gamma.
    double weight_exponent() const { return 1.0 - 2.0 * gamma_; }
    const std::vector<double>& y_nodes() const { return y_nodes_; }
    /// Number of y-levels including the trace level y = 0.
    std::size_t level_count() const { return y_nodes_.size(); }
    double y_max() const { return y_nodes_.back(); }

private:
    ExtensionMesh(const Grid& base, double gamma, std::vector<double> y_nodes);

    Grid base_;
    double gamma_;
    std::vector<double> y_nodes_;
};

/// Discrete function on an ExtensionMesh, stored level-major: the slab for
/// y-level j occupies indices [j*base_points, (j+1)*base_points).
struct ExtensionField {
    ExtensionMesh mesh;
    std::vector<double> values;

    double at(std::size_t base_index, std::size_t level) const;
    /// Restriction to y = 0, a Field on mesh.base().
    Field trace() const;
};

/// The extension constant d*_gamma = -2^(2*gamma-1)*Gamma(gamma) /
/// (gamma*Gamma(-gamma)) > 0 for gamma in (0,1).
double d_star(double gamma);

struct ExtensionSolveOptions {
    double tol = 1e-10; // relative residual of the PCG iteration
    int max_iter = 2000;
};

/// Solve div(y^a grad U) = 0 on base x (0, y_max] with trace f at y = 0 and
/// homogeneous Neumann at y_max. Finite-volume scheme: vertical faces carry
/// the flux-exact transmissibility 1/int y^(-a) dy across the face interval,
/// horizontal couplings and mode masses use the exact integral of y^a over
/// dual cells; y^a is never evaluated at y = 0. The matrix is a symmetric
/// M-matrix, so the discrete solution obeys the maximum principle and
/// minimizes the weighted energy among trace-f candidates.
ExtensionField solve_extension(const Field& f, const ExtensionMesh& mesh,
                               const ExtensionSolveOptions& opts = {});

/// Discrete weighted energy 1/2 * int y^a |grad U|^2 of an ExtensionField.
double weighted_energy(const ExtensionField& U);

struct DtnOptions {
    double q_c = 0.0;
    /// Eliminate the next-order y^(2-2*gamma) term of the boundary expansion
    /// from the first two interior levels.
    bool richardson = true;
};

/// Dirichlet-to-Neumann flux -d*_gamma * lim y^a dU/dy at y = 0 plus
/// q_c * trace; approximates conformal_operator(trace, params). The limit is
/// extracted from the y^(2*gamma) boundary behavior using the first interior
/// levels (one-sided weighted difference, optionally Richardson-refined).
Field dtn_flux(const ExtensionField& U, double gamma, const DtnOptions& opts = {});

/// Randomized Harnack experiment for the weighted operator: positive Dirichlet
/// data on the far boundary of the box [-1,1] x [0,1] (natural condition on
/// y = 0), solution ratios sup/inf taken over the half-balls of radius
/// `radius` and `radius/2` at the origin. The FKS constant is scale free, so
/// the two observed maxima should be comparable.
struct HarnackBoxConfig {
    double gamma = 0.5;
    int nodes_x = 65; // odd, so x = 0 is a node line
    int nodes_y = 33;
    int trials = 50;
    std::uint64_t seed = 12345;
    double radius = 0.25;
    double data_min = 0.05;
    double data_max = 1.0;
    /// Force the (x,y) = (-1,1) corner datum to zero (interior positivity
    /// stress case).
    bool vanishing_corner = false;
};

struct HarnackBoxReport {
    double max_ratio_outer = 0.0; // radius
    double max_ratio_inner = 0.0; // radius/2
    int trials = 0;
};

HarnackBoxReport check_harnack_fks(const HarnackBoxConfig& cfg);

} // namespace fyflow
