#pragma once

#include <cstddef>
#include <numbers>

namespace fyflow {

/// Periodic uniform lattice on the flat torus T^dim.
///
/// Each axis carries the same number of points (a power of two, so the
/// transforms stay radix-2) over the same side length. Point (i0,..,i_{d-1})
/// sits at coordinates i_a * spacing(); the lattice is flattened row-major
/// with axis 0 slowest.
class Grid {
public:
    Grid(int dim, int points_per_axis, double side_length = 2.0 * std::numbers::pi);

    int dim() const { return dim_; }
    int points_per_axis() const { return points_; }
    double side_length() const { return side_; }

    double spacing() const { return side_ / points_; }
    /// Quadrature weight per lattice point, spacing^dim.
    double cell_volume() const;
    std::size_t point_count() const;
    /// Flattened-index stride of one step along `axis`.
    std::size_t stride(int axis) const;

    bool operator==(const Grid&) const = default;

private:
    int dim_;
    int points_;
    double side_;
};

} // namespace fyflow
