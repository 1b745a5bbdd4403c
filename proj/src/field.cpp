#include "fyflow/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fyflow {

Field::Field(const Grid& grid, double fill)
    : grid_(grid), values_(grid.point_count(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.point_count())
        throw std::invalid_argument("field size " + std::to_string(values_.size()) +
                                    " does not match grid point count " +
                                    std::to_string(grid_.point_count()));
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

double integral(const Field& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
    return s * f.grid().cell_volume();
}

double lp_norm(const Field& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm requires p >= 1");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p);
    return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double sup(const Field& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, f[i]);
    return m;
}

double inf(const Field& f) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) m = std::min(m, f[i]);
    return m;
}

double inner(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s * f.grid().cell_volume();
}

Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator+");
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator-");
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Field operator*(double s, const Field& f) {
    Field out = f;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
    return out;
}

void axpy(Field& y, double s, const Field& x) {
    require_same_grid(y, x, "axpy");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

Field pow_plus(const Field& f, double p) {
    Field out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = f[i] > 0.0 ? std::pow(f[i], p) : 0.0;
    return out;
}

Field pow_field(const Field& f, double p) {
    Field out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::pow(f[i], p);
    return out;
}

Field positive_part(const Field& f) {
    Field out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0 ? f[i] : 0.0;
    return out;
}

} // namespace fyflow
