#pragma once

#include "fyflow/field.hpp"

#include <iosfwd>
#include <string>

namespace fyflow {

/// Flat binary format: header of three little-endian 64-bit values
/// (dim, points_per_axis as unsigned, side_length as IEEE double), then the
/// values as little-endian doubles in flat index order.
void write_field_binary(const Field& f, std::ostream& out);
Field read_field_binary(std::istream& in);
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const std::string& path);

/// CSV with one index column per axis followed by the value.
void write_field_csv(const Field& f, std::ostream& out);
void write_field_csv(const Field& f, const std::string& path);

/// Deterministic shortest-faithful formatting used by all text output.
std::string format_double(double v);

} // namespace fyflow
