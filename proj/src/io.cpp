#include "fyflow/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fyflow {

namespace {

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
    return r;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::uint64_t le = to_le(v);
    out.write(reinterpret_cast<const char*>(&le), 8);
}

void put_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t le = 0;
    in.read(reinterpret_cast<char*>(&le), 8);
    if (!in) throw std::runtime_error("field binary: truncated input");
    return to_le(le);
}

double get_f64(std::istream& in) {
    std::uint64_t bits = get_u64(in);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field_binary(const Field& f, std::ostream& out) {
    put_u64(out, static_cast<std::uint64_t>(f.grid().dim()));
    put_u64(out, static_cast<std::uint64_t>(f.grid().points_per_axis()));
    put_f64(out, f.grid().side_length());
    for (std::size_t i = 0; i < f.size(); ++i) put_f64(out, f[i]);
}

Field read_field_binary(std::istream& in) {
    auto dim = static_cast<int>(get_u64(in));
    auto pts = static_cast<int>(get_u64(in));
    double side = get_f64(in);
    Grid g(dim, pts, side);
    std::vector<double> vals(g.point_count());
    for (double& v : vals) v = get_f64(in);
    return Field(g, std::move(vals));
}

void write_field_binary(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_field_binary(f, out);
}

Field read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_field_binary(in);
}

void write_field_csv(const Field& f, std::ostream& out) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    for (int a = 0; a < g.dim(); ++a) out << 'i' << a << ',';
    out << "value\n";
    int idx3[3] = {0, 0, 0};
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) out << idx3[a] << ',';
        out << format_double(f[i]) << '\n';
        for (int a = g.dim() - 1; a >= 0; --a) {
            if (++idx3[a] < n) break;
            idx3[a] = 0;
        }
    }
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_field_csv(f, out);
}

} // namespace fyflow
