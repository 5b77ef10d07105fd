#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hellbayes {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive well-separated seeds from indices.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// master ⊕ hash(index)
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return master ^ splitmix64(index);
}

inline double sample_normal(Rng& rng, double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(rng);
}

inline double sample_uniform(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// log of a Gamma(shape, 1) variate; stable for very small shapes.
inline double sample_log_gamma(Rng& rng, double shape) {
    if (shape >= 1.0) {
        return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
    }
    // G(a) = G(a + 1) * U^(1/a)
    const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng);
    double u = sample_uniform(rng);
    while (u <= 0.0) u = sample_uniform(rng);
    return std::log(g) + std::log(u) / shape;
}

/// Gamma with shape/rate parameterization (mean = shape / rate).
inline double sample_gamma(Rng& rng, double shape, double rate) {
    return std::exp(sample_log_gamma(rng, shape)) / rate;
}

/// Inverse-gamma with shape/scale parameterization (mean = scale / (shape - 1)).
inline double sample_inverse_gamma(Rng& rng, double shape, double scale) {
    return scale * std::exp(-sample_log_gamma(rng, shape));
}

inline double sample_beta(Rng& rng, double a, double b) {
    const double la = sample_log_gamma(rng, a);
    const double lb = sample_log_gamma(rng, b);
    // a / (a + b) computed in log space
    return 1.0 / (1.0 + std::exp(lb - la));
}

}  // namespace hellbayes
