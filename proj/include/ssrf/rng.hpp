#pragma once

#include <cstdint>
#include <random>

namespace ssrf {

/// Seeded generator: std::mt19937_64 (fully specified by the C++ standard), 53-bit
/// uniforms built from its raw output, Box-Muller normals. Bit-reproducible across
/// platforms up to libm rounding in log/cos/sin.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal.
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Seed of replicate m: seed XOR m.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t m) { return seed ^ m; }

}  // namespace ssrf
