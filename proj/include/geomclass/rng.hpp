#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace geomclass::rng {

// Splitmix64: portable 64-bit generator with cheap stream splitting.
// Used everywhere randomness matters so results are bit-identical
// across platforms and standard library implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // burn a few outputs so nearby seeds decorrelate
        for (int i = 0; i < 4; ++i) splitmix64(state_);
    }

    // Derive an independent stream, e.g. one per sample or per run.
    Rng split(std::uint64_t stream) const {
        std::uint64_t s = state_ ^ (0x9e3779b97f4a7c15ull * (stream + 1));
        return Rng(s);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased enough for our purposes (n << 2^64)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // standard normal via Box-Muller (always consumes two uniforms)
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace geomclass::rng
