#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace kosim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for an independent stream, e.g. one Monte Carlo run.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) + 0xD1B54A32D192ED03ULL * (index + 1));
}

// mt19937_64 with hand-rolled variate transforms so that identical seeds give
// identical sequences regardless of the standard library's distribution
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53 bits of mantissa
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; u1 is shifted into (0, 1] so log() stays finite
    double normal(double sigma) {
        if (sigma == 0.0) return 0.0;
        double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // unbiased integer in [0, n)
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<__uint128_t>(engine_()) * n) >> 64);
    }

    bool coin() { return (engine_() & 1u) != 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace kosim
