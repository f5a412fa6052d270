#ifndef ANIMARL_RNG_HPP
#define ANIMARL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <cstddef>

namespace animarl {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic generator with platform-independent output. std::*_distribution
// is implementation-defined, so all uniform draws are produced here instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Warm up so that nearby seeds decorrelate.
        next_u64();
        next_u64();
    }

    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Standard normal via Box-Muller (two fresh uniforms per call, no caching,
    // so draw counts stay predictable).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace animarl

#endif
