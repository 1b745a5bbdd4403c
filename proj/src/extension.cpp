#include "fyflow/extension.hpp"

#include "fyflow/errors.hpp"
#include "fyflow/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace fyflow {

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

ExtensionMesh::ExtensionMesh(const Grid& base, double gamma, std::vector<double> y_nodes)
    : base_(base), gamma_(gamma), y_nodes_(std::move(y_nodes)) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    if (y_nodes_.size() < 2)
        throw std::invalid_argument("extension mesh needs at least two y-levels");
    if (y_nodes_.front() != 0.0)
        throw std::invalid_argument("extension mesh y-nodes must start at 0");
    for (std::size_t j = 1; j < y_nodes_.size(); ++j)
        if (!(y_nodes_[j] > y_nodes_[j - 1]))
            throw std::invalid_argument("extension mesh y-nodes must increase strictly");
}

ExtensionMesh ExtensionMesh::graded(const Grid& base, double gamma, int levels,
                                    double beta, double y_max) {
    if (levels < 2) throw std::invalid_argument("extension mesh needs levels >= 2");
    if (!(beta >= 1.0)) throw std::invalid_argument("grading beta must be >= 1");
    if (!(y_max > 0.0)) throw std::invalid_argument("y_max must be positive");
    std::vector<double> y(static_cast<std::size_t>(levels) + 1);
    for (int j = 0; j <= levels; ++j)
        y[j] = y_max * std::pow(static_cast<double>(j) / levels, beta);
    return ExtensionMesh(base, gamma, std::move(y));
}

ExtensionMesh ExtensionMesh::from_nodes(const Grid& base, double gamma,
                                        std::vector<double> y_nodes) {
    return ExtensionMesh(base, gamma, std::move(y_nodes));
}

double ExtensionField::at(std::size_t base_index, std::size_t level) const {
    return values[level * mesh.base().point_count() + base_index];
}

Field ExtensionField::trace() const {
    const std::size_t P = mesh.base().point_count();
    return Field(mesh.base(), std::vector<double>(values.begin(), values.begin() + P));
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

namespace {

// Exact integral of y^p over [lo, hi] for p in (-1,1).
double weight_integral(double lo, double hi, double p) {
    return (std::pow(hi, p + 1.0) - std::pow(lo, p + 1.0)) / (p + 1.0);
}

// Vertical face transmissibilities: T_j couples levels j and j+1 via
// T_j = 1/int_{y_j}^{y_{j+1}} y^(-a) dy, the flux-exact coefficient obtained
// by integrating the weight across the face interval. Reproduces the
// y^(2*gamma) boundary behavior and the flux limit exactly on local
// weighted-harmonic profiles.
std::vector<double> face_transmissibilities(const std::vector<double>& y, double a) {
    std::vector<double> T(y.size() - 1);
    for (std::size_t j = 0; j + 1 < y.size(); ++j)
        T[j] = 1.0 / weight_integral(y[j], y[j + 1], -a);
    return T;
}

// Dual-cell weight masses mu_j = int y^a over (y_{j-1/2}, y_{j+1/2}), clipped
// at the ends; these carry the horizontal couplings and mode masses.
std::vector<double> dual_cell_masses(const std::vector<double>& y, double a) {
    const std::size_t m = y.size();
    std::vector<double> mu(m);
    for (std::size_t j = 0; j < m; ++j) {
        double lo = j == 0 ? y.front() : 0.5 * (y[j - 1] + y[j]);
        double hi = j + 1 == m ? y.back() : 0.5 * (y[j] + y[j + 1]);
        mu[j] = weight_integral(lo, hi, a);
    }
    return mu;
}

// Periodic neighbor tables for the flattened base lattice.
struct NeighborTable {
    std::vector<std::size_t> plus;  // dim*P entries, axis-major
    std::vector<std::size_t> minus;
    int dim;
    std::size_t P;

    explicit NeighborTable(const Grid& g) : dim(g.dim()), P(g.point_count()) {
        plus.resize(static_cast<std::size_t>(dim) * P);
        minus.resize(static_cast<std::size_t>(dim) * P);
        const int n = g.points_per_axis();
        for (int a = 0; a < dim; ++a) {
            const std::size_t s = g.stride(a);
            for (std::size_t i = 0; i < P; ++i) {
                const std::size_t coord = (i / s) % static_cast<std::size_t>(n);
                plus[a * P + i] = coord + 1 < static_cast<std::size_t>(n)
                                      ? i + s
                                      : i - s * (n - 1);
                minus[a * P + i] = coord > 0 ? i - s : i + s * (n - 1);
            }
        }
    }
};

} // namespace

// ---------------------------------------------------------------------------
// Half-cylinder solve
// ---------------------------------------------------------------------------

namespace {

// Operator data for the scaled system (rows divided by dx^dim): vertical
// coupling T_j, horizontal coupling mu_j/dx^2 per axis.
struct CylinderOperator {
    const ExtensionMesh& mesh;
    NeighborTable nbr;
    std::vector<double> T;
    std::vector<double> mu;
    double inv_dx2;
    std::size_t P;
    std::size_t J; // interior levels 1..J

    explicit CylinderOperator(const ExtensionMesh& m)
        : mesh(m), nbr(m.base()),
          T(face_transmissibilities(m.y_nodes(), m.weight_exponent())),
          mu(dual_cell_masses(m.y_nodes(), m.weight_exponent())),
          inv_dx2(1.0 / (m.base().spacing() * m.base().spacing())),
          P(m.base().point_count()), J(m.level_count() - 1) {}

    // v -> A v on the interior unknowns (levels 1..J, level 0 excluded).
    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        for (std::size_t j = 1; j <= J; ++j) {
            const double* below = j >= 2 ? v.data() + (j - 2) * P : nullptr;
            const double* here = v.data() + (j - 1) * P;
            const double* above = j < J ? v.data() + j * P : nullptr;
            double* o = out.data() + (j - 1) * P;
            const double cxy = mu[j] * inv_dx2;
            for (std::size_t i = 0; i < P; ++i) {
                double r = T[j - 1] * here[i];
                if (below) r -= T[j - 1] * below[i];
                if (above) r += T[j] * (here[i] - above[i]);
                for (int a = 0; a < nbr.dim; ++a) {
                    r += cxy * (2.0 * here[i] - v[(j - 1) * P + nbr.plus[a * P + i]] -
                                v[(j - 1) * P + nbr.minus[a * P + i]]);
                }
                o[i] = r;
            }
        }
    }

    // Exact inverse via the tensor structure: DFT over the base per level,
    // one tridiagonal solve in y per base mode, inverse DFT.
    void precondition(const std::vector<double>& r, std::vector<double>& out,
                      const std::vector<double>& mode_symbol) const {
        const Grid& base = mesh.base();
        std::vector<std::complex<double>> slab(P), hat(P);
        std::vector<std::vector<std::complex<double>>> rhat(J);
        for (std::size_t j = 0; j < J; ++j) {
            for (std::size_t i = 0; i < P; ++i) slab[i] = r[j * P + i];
            rhat[j].resize(P);
            dft_complex(base, slab, rhat[j], -1);
        }
        // Thomas per mode; coefficients are real and SPD.
        std::vector<double> diag(J), cprime(J);
        std::vector<std::complex<double>> d(J);
        for (std::size_t m = 0; m < P; ++m) {
            for (std::size_t j = 1; j <= J; ++j) {
                double dd = T[j - 1] + mu[j] * mode_symbol[m];
                if (j < J) dd += T[j];
                diag[j - 1] = dd;
                d[j - 1] = rhat[j - 1][m];
            }
            for (std::size_t j = 1; j < J; ++j) {
                const double off = -T[j]; // couples rows j-1, j (0-based)
                const double w = off / diag[j - 1];
                diag[j] -= w * off;
                d[j] -= w * d[j - 1];
                cprime[j - 1] = off;
            }
            d[J - 1] /= diag[J - 1];
            for (std::size_t j = J - 1; j-- > 0;)
                d[j] = (d[j] - cprime[j] * d[j + 1]) / diag[j];
            for (std::size_t j = 0; j < J; ++j) rhat[j][m] = d[j];
        }
        const double scale = 1.0 / static_cast<double>(P);
        for (std::size_t j = 0; j < J; ++j) {
            dft_complex(base, rhat[j], slab, +1);
            for (std::size_t i = 0; i < P; ++i) out[j * P + i] = slab[i].real() * scale;
        }
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

ExtensionField solve_extension(const Field& f, const ExtensionMesh& mesh,
                               const ExtensionSolveOptions& opts) {
    if (!(f.grid() == mesh.base()))
        throw std::invalid_argument("solve_extension: trace field is not on mesh.base()");

    const CylinderOperator op(mesh);
    const std::size_t P = op.P, J = op.J, N = P * J;
    std::vector<double> mode_symbol = symbol_discrete_laplacian(mesh.base());

    // Dirichlet level contributes T_0 * f to the first interior level.
    std::vector<double> b(N, 0.0);
    for (std::size_t i = 0; i < P; ++i) b[i] = op.T[0] * f[i];

    const double bnorm = std::sqrt(dot(b, b));
    std::vector<double> x(N, 0.0);
    if (bnorm > 0.0) {
        // PCG on the SPD system; the tensor preconditioner is exact, so this
        // converges in one or two iterations, but the residual check keeps the
        // contract honest.
        std::vector<double> r = b, z(N), p(N), Ap(N);
        op.precondition(r, z, mode_symbol);
        p = z;
        double rz = dot(r, z);
        double rel = 1.0;
        int it = 0;
        for (it = 0; it < opts.max_iter; ++it) {
            op.apply(p, Ap);
            const double alpha = rz / dot(p, Ap);
            for (std::size_t i = 0; i < N; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
            rel = std::sqrt(dot(r, r)) / bnorm;
            if (rel <= opts.tol) break;
            op.precondition(r, z, mode_symbol);
            const double rz2 = dot(r, z);
            for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + (rz2 / rz) * p[i];
            rz = rz2;
        }
        if (rel > opts.tol)
            throw SolverError("extension solve did not converge: relative residual " +
                                  std::to_string(rel),
                              rel, it);
    }

    ExtensionField U{mesh, std::vector<double>((J + 1) * P)};
    for (std::size_t i = 0; i < P; ++i) U.values[i] = f[i];
    std::copy(x.begin(), x.end(), U.values.begin() + P);
    return U;
}

double weighted_energy(const ExtensionField& U) {
    const ExtensionMesh& mesh = U.mesh;
    const Grid& base = mesh.base();
    const NeighborTable nbr(base);
    const double a = mesh.weight_exponent();
    const std::vector<double>& y = mesh.y_nodes();
    const std::vector<double> T = face_transmissibilities(y, a);
    const std::vector<double> mu = dual_cell_masses(y, a);
    const std::size_t P = base.point_count();
    const double inv_dx2 = 1.0 / (base.spacing() * base.spacing());

    double e = 0.0;
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
        const double* lo = U.values.data() + j * P;
        const double* hi = U.values.data() + (j + 1) * P;
        double s = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            const double d = hi[i] - lo[i];
            s += d * d;
        }
        e += T[j] * s;
    }
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double* lev = U.values.data() + j * P;
        double s = 0.0;
        for (int ax = 0; ax < base.dim(); ++ax)
            for (std::size_t i = 0; i < P; ++i) {
                const double d = lev[nbr.plus[ax * P + i]] - lev[i];
                s += d * d;
            }
        e += mu[j] * inv_dx2 * s;
    }
    return 0.5 * e * base.cell_volume();
}

// ---------------------------------------------------------------------------
// Boundary flux
// ---------------------------------------------------------------------------

double d_star(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    return -std::pow(2.0, 2.0 * gamma - 1.0) * std::tgamma(gamma) /
           (gamma * std::tgamma(-gamma));
}

Field dtn_flux(const ExtensionField& U, double gamma, const DtnOptions& opts) {
    const ExtensionMesh& mesh = U.mesh;
    if (gamma != mesh.gamma())
        throw std::invalid_argument("dtn_flux gamma does not match the mesh weight");
    const std::size_t needed = opts.richardson ? 3 : 2;
    if (mesh.level_count() < needed)
        throw std::invalid_argument("dtn_flux needs at least two interior y-levels");

    const std::vector<double>& y = mesh.y_nodes();
    const double y1p = std::pow(y[1], 2.0 * gamma);
    if (!(y1p > 0.0) || !std::isfinite(1.0 / y1p))
        throw std::invalid_argument(
            "mesh too coarse near y=0: first-node weight underflow");

    const double ds = d_star(gamma);
    const std::size_t P = mesh.base().point_count();
    Field out(mesh.base());

    // U - trace behaves like b*y^(2*gamma) + c*y^2 near the boundary;
    // lim y^a dU/dy = 2*gamma*b.
    if (!opts.richardson) {
        for (std::size_t i = 0; i < P; ++i) {
            const double b = (U.at(i, 1) - U.at(i, 0)) / y1p;
            out[i] = -ds * 2.0 * gamma * b + opts.q_c * U.at(i, 0);
        }
        return out;
    }
    const double y2p = std::pow(y[2], 2.0 * gamma);
    const double p = 2.0 - 2.0 * gamma;
    const double w1 = std::pow(y[2], p);
    const double w2 = std::pow(y[1], p);
    const double denom = w1 - w2;
    for (std::size_t i = 0; i < P; ++i) {
        const double b1 = (U.at(i, 1) - U.at(i, 0)) / y1p;
        const double b2 = (U.at(i, 2) - U.at(i, 0)) / y2p;
        const double b = (b1 * w1 - b2 * w2) / denom;
        out[i] = -ds * 2.0 * gamma * b + opts.q_c * U.at(i, 0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// FKS Harnack box experiment
// ---------------------------------------------------------------------------

namespace {

// Dirichlet problem for div(y^a grad U) = 0 on [-1,1] x [0,1]: data on
// x = +-1 and y = 1, natural condition on y = 0. Nodes uniform, unknowns
// (i,j) for i in [1,nx-2], j in [0,ny-2]. Same weight machinery as the
// cylinder; y-line preconditioned CG.
struct BoxProblem {
    int nx, ny;
    double dx;
    std::vector<double> xs, ys, T, mu;

    BoxProblem(int nx_, int ny_, double a) : nx(nx_), ny(ny_) {
        xs.resize(nx);
        ys.resize(ny);
        for (int i = 0; i < nx; ++i) xs[i] = -1.0 + 2.0 * i / (nx - 1);
        for (int j = 0; j < ny; ++j) ys[j] = static_cast<double>(j) / (ny - 1);
        dx = 2.0 / (nx - 1);
        T = face_transmissibilities(ys, a);
        mu = dual_cell_masses(ys, a);
    }

    std::size_t unknowns() const {
        return static_cast<std::size_t>(nx - 2) * static_cast<std::size_t>(ny - 1);
    }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * (nx - 2) + (i - 1);
    }

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const double idx2 = 1.0 / (dx * dx);
        for (int j = 0; j < ny - 1; ++j)
            for (int i = 1; i <= nx - 2; ++i) {
                const std::size_t r = index(i, j);
                double s = 0.0;
                if (j > 0) s += T[j - 1] * (v[r] - v[index(i, j - 1)]);
                s += T[j] * v[r];
                if (j + 1 <= ny - 2) s -= T[j] * v[index(i, j + 1)];
                const double cx = mu[j] * idx2;
                s += 2.0 * cx * v[r];
                if (i > 1) s -= cx * v[index(i - 1, j)];
                if (i < nx - 2) s -= cx * v[index(i + 1, j)];
                out[r] = s;
            }
    }

    // Tridiagonal solve per x-column, keeping the full diagonal.
    void precondition(const std::vector<double>& r, std::vector<double>& out) const {
        const double idx2 = 1.0 / (dx * dx);
        const int J = ny - 1;
        std::vector<double> diag(J), rhs(J), off(J);
        for (int i = 1; i <= nx - 2; ++i) {
            for (int j = 0; j < J; ++j) {
                double dd = T[j] + 2.0 * mu[j] * idx2;
                if (j > 0) dd += T[j - 1];
                diag[j] = dd;
                rhs[j] = r[index(i, j)];
                off[j] = j + 1 < J ? -T[j] : 0.0;
            }
            for (int j = 1; j < J; ++j) {
                const double w = off[j - 1] / diag[j - 1];
                diag[j] -= w * off[j - 1];
                rhs[j] -= w * rhs[j - 1];
            }
            rhs[J - 1] /= diag[J - 1];
            for (int j = J - 2; j >= 0; --j)
                rhs[j] = (rhs[j] - off[j] * rhs[j + 1]) / diag[j];
            for (int j = 0; j < J; ++j) out[index(i, j)] = rhs[j];
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        const std::size_t N = unknowns();
        std::vector<double> x(N, 0.0), r = b, z(N), p(N), Ap(N);
        const double bnorm = std::sqrt(dot(b, b));
        if (bnorm == 0.0) return x;
        precondition(r, z);
        p = z;
        double rz = dot(r, z);
        int it = 0;
        double rel = 1.0;
        for (it = 0; it < 20000; ++it) {
            apply(p, Ap);
            const double alpha = rz / dot(p, Ap);
            for (std::size_t q = 0; q < N; ++q) {
                x[q] += alpha * p[q];
                r[q] -= alpha * Ap[q];
            }
            rel = std::sqrt(dot(r, r)) / bnorm;
            if (rel <= 1e-10) break;
            precondition(r, z);
            const double rz2 = dot(r, z);
            for (std::size_t q = 0; q < N; ++q) p[q] = z[q] + (rz2 / rz) * p[q];
            rz = rz2;
        }
        if (rel > 1e-10)
            throw SolverError("harnack box solve did not converge", rel, it);
        return x;
    }
};

} // namespace

HarnackBoxReport check_harnack_fks(const HarnackBoxConfig& cfg) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    if (cfg.nodes_x < 9 || cfg.nodes_y < 5)
        throw std::invalid_argument("harnack box resolution too small");
    const double a = 1.0 - 2.0 * cfg.gamma;
    BoxProblem box(cfg.nodes_x, cfg.nodes_y, a);

    HarnackBoxReport report;
    report.trials = cfg.trials;
    const double R1 = cfg.radius, R2 = 0.5 * cfg.radius;

    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = derive_stream(cfg.seed, stream_id::harnack_box,
                                static_cast<std::uint64_t>(trial));
        // Boundary data in fixed node order: left column, right column, top row.
        std::vector<double> b(box.unknowns(), 0.0);
        const double idx2 = 1.0 / (box.dx * box.dx);
        auto datum = [&](int i, int j) {
            double v = rng.uniform(cfg.data_min, cfg.data_max);
            // bottom-left corner sits on the degenerate line y = 0
            if (cfg.vanishing_corner && i == 0 && j == 0) v = 0.0;
            return v;
        };
        for (int j = 0; j < cfg.nodes_y - 1; ++j)
            b[box.index(1, j)] += box.mu[j] * idx2 * datum(0, j);
        for (int j = 0; j < cfg.nodes_y - 1; ++j)
            b[box.index(cfg.nodes_x - 2, j)] += box.mu[j] * idx2 * datum(cfg.nodes_x - 1, j);
        for (int i = 0; i < cfg.nodes_x; ++i) {
            const double v = datum(i, cfg.nodes_y - 1);
            if (i >= 1 && i <= cfg.nodes_x - 2)
                b[box.index(i, cfg.nodes_y - 2)] += box.T[cfg.nodes_y - 2] * v;
        }

        std::vector<double> U = box.solve(b);

        double s1 = -1e300, i1 = 1e300, s2 = -1e300, i2 = 1e300;
        for (int j = 0; j < cfg.nodes_y - 1; ++j)
            for (int i = 1; i <= cfg.nodes_x - 2; ++i) {
                const double rr = box.xs[i] * box.xs[i] + box.ys[j] * box.ys[j];
                const double val = U[box.index(i, j)];
                if (rr <= R1 * R1) {
                    s1 = std::max(s1, val);
                    i1 = std::min(i1, val);
                }
                if (rr <= R2 * R2) {
                    s2 = std::max(s2, val);
                    i2 = std::min(i2, val);
                }
            }
        report.max_ratio_outer = std::max(report.max_ratio_outer, s1 / i1);
        report.max_ratio_inner = std::max(report.max_ratio_inner, s2 / i2);
    }
    return report;
}

} // namespace fyflow
