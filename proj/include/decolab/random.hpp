// random.hpp: portable seeded generator and random quantum objects.
//
// xoshiro256** (Blackman & Vigna) seeded through splitmix64, so any
// implementation with the published constants reproduces the same stream.

#pragma once

#include "decolab/operator_core.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace decolab {

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) {
        std::uint64_t z = seed;
        for (auto& w : s_) w = splitmix64(z);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller; the second variate is discarded so the stream position
    // depends only on the number of calls.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complex_normal() { return {normal() / std::numbers::sqrt2, normal() / std::numbers::sqrt2}; }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> s_{};
};

// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases removed.
Matrix random_unitary(std::size_t n, Xoshiro256& rng);
Ket random_ket(const HilbertSpace& space, Xoshiro256& rng);
// Full-rank density W W^dagger / tr with complex Gaussian W.
DenseOperator random_density(const HilbertSpace& space, Xoshiro256& rng);
// (G + G^dagger) / 2 scaled to unit spectral norm.
DenseOperator random_hermitian(const HilbertSpace& space, Xoshiro256& rng);

} // namespace decolab
