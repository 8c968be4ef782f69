#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace biknn {

// std::uniform_int_distribution and std::shuffle are implementation-defined;
// these helpers only rely on the fully specified mt19937_64 output sequence.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    // Lemire-style rejection to avoid modulo bias.
    const std::uint64_t limit = Rng::max() - (Rng::max() % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace biknn
