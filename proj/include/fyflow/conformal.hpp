#pragma once

#include "fyflow/field.hpp"

#include <span>
#include <vector>

namespace fyflow {

/// Scattered samples in R^n for pointwise conformal-map identities (the torus
/// grid has no meaningful Kelvin action).
struct PointCloudField {
    int dim = 0;
    std::vector<double> coords; // flattened, point i at [i*dim, (i+1)*dim)
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

/// Kelvin transform: points reflected through the unit sphere, values
/// |x|^-(n-2*gamma) * f(x/|x|^2). An involution; rejects clouds containing
/// the origin.
PointCloudField kelvin_transform(const PointCloudField& f, int n, double gamma);

/// Inverse stereographic projection R^n -> S^n in R^(n+1):
/// x -> (2x/(1+|x|^2), (|x|^2-1)/(|x|^2+1)). x = 0 maps to the south pole;
/// |x| -> infinity approaches the north pole (0,...,0,1).
std::vector<double> stereographic_inverse(std::span<const double> x);

/// Stereographic projection from the north pole, the left inverse of
/// stereographic_inverse away from the pole.
std::vector<double> stereographic_forward(std::span<const double> p);

/// The standard bubble (1+|x|^2)^(-(n-2*gamma)/2), a pointwise fixed point of
/// the Kelvin transform.
double bubble_profile(std::span<const double> x, int n, double gamma);

struct CheckPair {
    double lhs;
    double rhs;
};

/// Both sides of the Stroock-Varopoulos inequality for the pure fractional
/// part, read with the dimensionally consistent operator pairing
///   int v^(q-1) (-Delta)^gamma v >= 4(q-1)/q^2 * int |(-Delta)^(gamma/2) v^(q/2)|^2
/// (the q = 2 case is a Parseval identity and pins the pairing). Requires
/// v > 0 pointwise and q > 1.
CheckPair stroock_varopoulos_check(const Field& v, double gamma, double q);

/// sup(w)/inf(w) for positive w.
double harnack_quotient(const Field& w);

/// sup over points of |grad w|/w, with the gradient taken spectrally.
double grad_quotient(const Field& w);

} // namespace fyflow
