#include "fyflow/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace fyflow {

namespace {

// FFTW plan creation is not thread-safe; executions on distinct buffers are.
// Plans are cached per (dim, n, sign), created with FFTW_UNALIGNED so they
// can run on any caller buffer via the new-array interface.
class PlanCache {
public:
    static fftw_plan get(int dim, int n, int sign) {
        static PlanCache cache;
        std::scoped_lock lock(cache.mutex_);
        auto key = std::make_tuple(dim, n, sign);
        auto it = cache.plans_.find(key);
        if (it != cache.plans_.end()) return it->second;

        std::size_t total = 1;
        int dims[3] = {n, n, n};
        for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
        std::vector<std::complex<double>> in(total), out(total);
        fftw_plan p = fftw_plan_dft(dim, dims,
                                    reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        cache.plans_.emplace(key, p);
        return p;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& g, std::vector<std::complex<double>>& in,
             std::vector<std::complex<double>>& out, int sign) {
    fftw_plan p = PlanCache::get(g.dim(), g.points_per_axis(), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

// Visit every flattened index together with its per-axis mode indices.
template <typename F>
void for_each_mode(const Grid& g, F&& fn) {
    const int n = g.points_per_axis();
    std::size_t idx = 0;
    int k[3] = {0, 0, 0};
    const std::size_t total = g.point_count();
    for (idx = 0; idx < total; ++idx) {
        fn(idx, k);
        for (int a = g.dim() - 1; a >= 0; --a) {
            if (++k[a] < n) break;
            k[a] = 0;
        }
    }
}

} // namespace

int integer_frequency(int k, int points_per_axis) {
    return k <= points_per_axis / 2 ? k : k - points_per_axis;
}

SpectralField dft_forward(const Field& f) {
    std::vector<std::complex<double>> in(f.size()), out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) in[i] = f[i];
    execute(f.grid(), in, out, FFTW_FORWARD);
    return {f.grid(), std::move(out)};
}

Field dft_inverse(const SpectralField& F) {
    if (F.coeffs.size() != F.grid.point_count())
        throw std::invalid_argument("spectral field size does not match grid");
    std::vector<std::complex<double>> in = F.coeffs, out(F.coeffs.size());
    execute(F.grid, in, out, FFTW_BACKWARD);
    Field f(F.grid);
    const double scale = 1.0 / static_cast<double>(F.grid.point_count());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = out[i].real() * scale;
    return f;
}

std::vector<double> symbol_xi_squared(const Grid& grid) {
    std::vector<double> sym(grid.point_count());
    const int n = grid.points_per_axis();
    const double unit = 2.0 * std::numbers::pi / grid.side_length();
    for_each_mode(grid, [&](std::size_t idx, const int* k) {
        double s = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            double xi = unit * integer_frequency(k[a], n);
            s += xi * xi;
        }
        sym[idx] = s;
    });
    return sym;
}

std::vector<double> symbol_discrete_laplacian(const Grid& grid) {
    std::vector<double> sym(grid.point_count());
    const int n = grid.points_per_axis();
    const double dx2 = grid.spacing() * grid.spacing();
    for_each_mode(grid, [&](std::size_t idx, const int* k) {
        double s = 0.0;
        for (int a = 0; a < grid.dim(); ++a)
            s += 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k[a] / n);
        sym[idx] = s / dx2;
    });
    return sym;
}

Field apply_multiplier(const Field& f, std::span<const double> multiplier) {
    if (multiplier.size() != f.size())
        throw std::invalid_argument("multiplier size does not match field");
    std::vector<std::complex<double>> buf(f.size()), hat(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) buf[i] = f[i];
    execute(f.grid(), buf, hat, FFTW_FORWARD);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= multiplier[i];
    execute(f.grid(), hat, buf, FFTW_BACKWARD);
    Field out(f.grid());
    const double scale = 1.0 / static_cast<double>(f.grid().point_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real() * scale;
    return out;
}

void dft_complex(const Grid& grid, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out, int sign) {
    if (in.size() != grid.point_count() || out.size() != grid.point_count())
        throw std::invalid_argument("dft_complex: size does not match grid");
    std::vector<std::complex<double>> tmp(in.begin(), in.end());
    fftw_plan p = PlanCache::get(grid.dim(), grid.points_per_axis(),
                                 sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<Field> spectral_gradient(const Field& f) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    const double unit = 2.0 * std::numbers::pi / g.side_length();
    SpectralField F = dft_forward(f);
    std::vector<Field> grad;
    grad.reserve(g.dim());
    for (int axis = 0; axis < g.dim(); ++axis) {
        SpectralField D{g, std::vector<std::complex<double>>(F.coeffs.size())};
        for_each_mode(g, [&](std::size_t idx, const int* k) {
            int kf = integer_frequency(k[axis], n);
            if (kf == n / 2) kf = 0; // Nyquist has no signed partner
            D.coeffs[idx] = std::complex<double>(0.0, unit * kf) * F.coeffs[idx];
        });
        grad.push_back(dft_inverse(D));
    }
    return grad;
}

} // namespace fyflow
