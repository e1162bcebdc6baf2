#pragma once

#include "core/types.hpp"

#include <cmath>
#include <cstdint>

namespace facetflow {

// xoshiro256** seeded through splitmix64. Hand-rolled so that every stream
// is bit-identical across platforms and standard libraries; reports carry
// the seed, so the whole sweep is replayable.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    // Deterministic substream for chunk/worker `index` of a sweep.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed;
        std::uint64_t mixed = splitmix64(sm) ^ (0xD1B54A32D192ED03ULL * (index + 1));
        return Rng(mixed);
    }

    std::uint64_t next_u64() {
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

    // Uniform in [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Box-Muller; no state cached so streams stay position-independent.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform direction on the unit sphere of N-by-n matrices.
    GradMat direction(Eigen::Index rows, Eigen::Index cols) {
        GradMat xi(rows, cols);
        double nrm = 0.0;
        do {
            for (Eigen::Index j = 0; j < cols; ++j)
                for (Eigen::Index i = 0; i < rows; ++i) xi(i, j) = normal();
            nrm = xi.norm();
        } while (nrm < 1e-300);
        return xi / nrm;
    }

    // Log-uniform radius in [rmin, rmax], uniform direction.
    GradMat sample_matrix(Eigen::Index rows, Eigen::Index cols, double rmin, double rmax) {
        return log_uniform(rmin, rmax) * direction(rows, cols);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace facetflow
