#include "fyflow/conformal.hpp"

#include "fyflow/fft.hpp"
#include "fyflow/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fyflow {

PointCloudField kelvin_transform(const PointCloudField& f, int n, double gamma) {
    if (f.coords.size() != f.values.size() * static_cast<std::size_t>(f.dim))
        throw std::invalid_argument("point cloud coordinate/value lengths disagree");
    if (n < 1 || !(gamma > 0.0 && gamma < 1.0) || !(n > 2.0 * gamma))
        throw std::invalid_argument("kelvin transform needs n > 2*gamma, gamma in (0,1)");

    const double s = n - 2.0 * gamma;
    PointCloudField out;
    out.dim = f.dim;
    out.coords.resize(f.coords.size());
    out.values.resize(f.values.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = f.point(i);
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        if (r2 == 0.0)
            throw std::invalid_argument("kelvin transform undefined at the origin");
        // output point y = x/|x|^2 carries |y|^(-s) f(y/|y|^2) = |x|^s f(x)
        for (int d = 0; d < f.dim; ++d)
            out.coords[i * f.dim + d] = x[d] / r2;
        out.values[i] = std::pow(r2, 0.5 * s) * f.values[i];
    }
    return out;
}

std::vector<double> stereographic_inverse(std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    std::vector<double> p(x.size() + 1);
    const double denom = 1.0 + r2;
    for (std::size_t d = 0; d < x.size(); ++d) p[d] = 2.0 * x[d] / denom;
    p[x.size()] = (r2 - 1.0) / (r2 + 1.0);
    return p;
}

std::vector<double> stereographic_forward(std::span<const double> p) {
    if (p.size() < 2) throw std::invalid_argument("sphere point needs at least 2 coords");
    const double last = p.back();
    if (!(last < 1.0))
        throw std::invalid_argument("stereographic projection undefined at the north pole");
    std::vector<double> x(p.size() - 1);
    for (std::size_t d = 0; d + 1 < p.size(); ++d) x[d] = p[d] / (1.0 - last);
    return x;
}

double bubble_profile(std::span<const double> x, int n, double gamma) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::pow(1.0 + r2, -0.5 * (n - 2.0 * gamma));
}

CheckPair stroock_varopoulos_check(const Field& v, double gamma, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("stroock-varopoulos requires q > 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    if (!(inf(v) > 0.0))
        throw std::invalid_argument("stroock-varopoulos requires v > 0 pointwise");

    const Field Pv = fractional_laplacian(v, gamma);
    double lhs = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        lhs += std::pow(v[i], q - 1.0) * Pv[i];
    lhs *= v.grid().cell_volume();

    const Field vq = pow_field(v, 0.5 * q);
    const Field half = fractional_laplacian(vq, 0.5 * gamma);
    const double rhs = 4.0 * (q - 1.0) / (q * q) * inner(half, half);
    return {lhs, rhs};
}

double harnack_quotient(const Field& w) {
    const double wi = inf(w);
    if (!(wi > 0.0)) throw std::invalid_argument("harnack quotient requires w > 0");
    return sup(w) / wi;
}

double grad_quotient(const Field& w) {
    const double wi = inf(w);
    if (!(wi > 0.0)) throw std::invalid_argument("grad quotient requires w > 0");
    const std::vector<Field> grad = spectral_gradient(w);
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double g2 = 0.0;
        for (const Field& gax : grad) g2 += gax[i] * gax[i];
        m = std::max(m, std::sqrt(g2) / w[i]);
    }
    return m;
}

} // namespace fyflow
