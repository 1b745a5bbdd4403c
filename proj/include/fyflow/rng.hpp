#pragma once

#include <cstdint>

namespace fyflow {

/// SplitMix64 generator: tiny, fast, identical on every platform. Used for
/// all randomized checks so runs are reproducible from a single seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform in [0,1) with 53 random bits.
    double uniform01();
    double uniform(double a, double b);
    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal();

private:
    std::uint64_t state_;
};

/// Counter scheme expanding one 64-bit seed into independent streams:
/// stream state = mix(seed ^ check_id*C1 ^ trial*C2). Each randomized check
/// owns a fixed check_id, so adding a check never shifts another's draws.
Rng derive_stream(std::uint64_t seed, std::uint64_t check_id, std::uint64_t trial = 0);

/// Fixed stream ids for the built-in randomized checks.
namespace stream_id {
inline constexpr std::uint64_t t_contraction = 1;
inline constexpr std::uint64_t stroock_varopoulos = 2;
inline constexpr std::uint64_t harnack_box = 3;
inline constexpr std::uint64_t kelvin = 4;
inline constexpr std::uint64_t stereographic = 5;
inline constexpr std::uint64_t initial_data = 6;
inline constexpr std::uint64_t gradient_check = 7;
} // namespace stream_id

} // namespace fyflow
