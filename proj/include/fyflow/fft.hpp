#pragma once

#include "fyflow/field.hpp"

#include <complex>
#include <vector>

namespace fyflow {

/// Unnormalized forward DFT coefficients of a Field, laid out like the field
/// itself (mode index k per axis in [0, N), negative frequencies in the upper
/// half). The inverse transform divides by the point count, so
/// dft_inverse(dft_forward(f)) == f up to round-off.
struct SpectralField {
    Grid grid;
    std::vector<std::complex<double>> coeffs;
};

SpectralField dft_forward(const Field& f);
Field dft_inverse(const SpectralField& F);

/// Integer frequency of mode index k on an axis with N points: k for
/// k <= N/2, k - N otherwise (the symmetric range).
int integer_frequency(int k, int points_per_axis);

/// |xi|^2 per flattened mode index, with the physical frequency convention
/// xi = 2*pi*k/side_length, k integer.
std::vector<double> symbol_xi_squared(const Grid& grid);

/// Discrete 3-point Laplacian symbol per flattened mode index,
/// sum_axes (2 - 2cos(2*pi*k_a/N)) / dx^2.
std::vector<double> symbol_discrete_laplacian(const Grid& grid);

/// Apply a real even Fourier multiplier; the output is real by conjugate
/// symmetry (imaginary round-off is discarded).
Field apply_multiplier(const Field& f, std::span<const double> multiplier);

/// Spectral partial derivatives, one Field per axis (Nyquist mode zeroed).
std::vector<Field> spectral_gradient(const Field& f);

/// Unnormalized complex DFT on grid-shaped data, sign -1 forward / +1
/// backward (backward is not scaled). Hook for tensor-structured solvers.
void dft_complex(const Grid& grid, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out, int sign);

} // namespace fyflow
