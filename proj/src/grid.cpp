#include "fyflow/grid.hpp"

#include <stdexcept>
#include <string>

namespace fyflow {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

Grid::Grid(int dim, int points_per_axis, double side_length)
    : dim_(dim), points_(points_per_axis), side_(side_length) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("grid dim must be 1, 2 or 3");
    if (!is_power_of_two(points_per_axis))
        throw std::invalid_argument("grid points_per_axis must be a power of two, got " +
                                    std::to_string(points_per_axis));
    if (!(side_length > 0.0))
        throw std::invalid_argument("grid side_length must be positive");
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing();
    return v;
}

std::size_t Grid::point_count() const {
    std::size_t c = 1;
    for (int a = 0; a < dim_; ++a) c *= static_cast<std::size_t>(points_);
    return c;
}

std::size_t Grid::stride(int axis) const {
    std::size_t s = 1;
    for (int a = axis + 1; a < dim_; ++a) s *= static_cast<std::size_t>(points_);
    return s;
}

} // namespace fyflow
