#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace cayley {

// Independent deterministic streams per (seed, stream) so that, for example, a
// Haar sample and a random state drawn with the same user seed are unrelated.
enum class RngStream : std::uint32_t {
    haar_unitary = 1,
    random_state = 2,
    dataset = 3,
    test = 99,
};

inline std::mt19937_64 make_engine(std::uint64_t seed, RngStream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

/// Standard complex Gaussian: E|z|^2 = 1.
template <class Engine>
std::complex<double> complex_gaussian(Engine &engine) {
    std::normal_distribution<double> normal(0.0, 0.7071067811865476);
    double re = normal(engine);
    double im = normal(engine);
    return {re, im};
}

}  // namespace cayley
