#pragma once

// Portable random helpers. The standard distributions are implementation
// defined, so everything that must be reproducible across toolchains draws
// through these instead.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace etm {

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

/// Inverse-CDF draw from nonnegative weights that need not be normalized.
inline std::size_t sample_discrete(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform_real(rng) * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return k;
    }
    // u landed on the rounding slack at the top; return the last positive bin
    for (std::size_t k = weights.size(); k > 0; --k) {
        if (weights[k - 1] > 0.0) return k - 1;
    }
    return weights.size() - 1;
}

}  // namespace etm
