#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "polymix/vec.hpp"

namespace polymix {

using Rng = std::mt19937_64;

/// Independent engine for (seed, stream): lets chunked or per-purpose
/// sampling stay reproducible regardless of how work is split.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the combined key
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    std::seed_seq seq{static_cast<std::uint32_t>(z), static_cast<std::uint32_t>(z >> 32),
                      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>()(rng); }

inline Vec normal_vec(Rng& rng, int d, double scale = 1.0)
{
    Vec v(d);
    for (int i = 0; i < d; ++i)
        v[i] = scale * standard_normal(rng);
    return v;
}

inline Vec uniform_sphere(Rng& rng, int d)
{
    for (;;) {
        Vec v = normal_vec(rng, d);
        double n = norm(v);
        if (n > 1e-12)
            return v * (1.0 / n);
    }
}

/// Beta(a, b) variate via the ratio of two Gamma variates.
inline double beta_variate(Rng& rng, double a, double b)
{
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    const double s = x + y;
    return s > 0.0 ? x / s : 0.5;
}

inline double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

}  // namespace polymix
