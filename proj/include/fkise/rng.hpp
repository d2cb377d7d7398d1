#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

namespace fkise {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// One stream per (seed, module tag, replica index). Adding replicas never
// perturbs existing streams, so aggregate outputs stay reproducible when a
// run is extended.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t replica = 0) {
    std::uint64_t s = seed ^ fnv1a64(tag) ^ (replica * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    const std::uint32_t w0 = static_cast<std::uint32_t>(splitmix64_next(s));
    const std::uint32_t w1 = static_cast<std::uint32_t>(splitmix64_next(s));
    const std::uint32_t w2 = static_cast<std::uint32_t>(splitmix64_next(s));
    const std::uint32_t w3 = static_cast<std::uint32_t>(splitmix64_next(s));
    std::seed_seq seq{w0, w1, w2, w3};
    return std::mt19937_64(seq);
}

// Uniform in [0,1). 53 random bits so the sequence is identical on every
// platform; std::uniform_real_distribution is implementation-defined.
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in (0,1), safe as a log() argument.
inline double u01_pos(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller without caching: two uniforms per normal draw, bit-reproducible.
inline double normal(std::mt19937_64& rng) {
    const double u = u01_pos(rng);
    const double v = u01(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
}

// Marsaglia-Tsang gamma sampler, shape boosting for shape < 1.
inline double gamma_draw(std::mt19937_64& rng, double shape) {
    if (shape < 1.0) {
        const double g = gamma_draw(rng, shape + 1.0);
        return g * std::pow(u01_pos(rng), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = u01_pos(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// chi^2_k = Gamma(k/2, scale 2)
inline double chi_squared_draw(std::mt19937_64& rng, double dof) {
    return 2.0 * gamma_draw(rng, 0.5 * dof);
}

}  // namespace fkise
