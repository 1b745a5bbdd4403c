#pragma once

#include "fyflow/grid.hpp"

#include <span>
#include <vector>

namespace fyflow {

/// Real-valued function sampled on a Grid. Value semantics; operations on
/// fields never mutate their inputs. All reductions run in flat index order
/// so results are bit-reproducible.
class Field {
public:
    explicit Field(const Grid& grid, double fill = 0.0);
    Field(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Quadrature-weighted sum; exact for trigonometric polynomials below the
/// Nyquist frequency.
double integral(const Field& f);
/// (sum |f|^p dV)^(1/p); rejects p < 1.
double lp_norm(const Field& f, double p);
double sup(const Field& f);
double inf(const Field& f);
/// Quadrature-weighted L2 inner product.
double inner(const Field& f, const Field& g);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& f);

/// y += s*x
void axpy(Field& y, double s, const Field& x);
/// Pointwise max(f, 0)^p.
Field pow_plus(const Field& f, double p);
/// Pointwise |f|^p with sign kept for even use-cases left to callers; here
/// fields are nonnegative when this is used.
Field pow_field(const Field& f, double p);
/// Pointwise positive part.
Field positive_part(const Field& f);

void require_same_grid(const Field& a, const Field& b, const char* where);

} // namespace fyflow
