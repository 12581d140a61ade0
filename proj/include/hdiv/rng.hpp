#pragma once

// Seeded randomness. The engine is std::mt19937_64 (fully specified by the
// standard); the distribution transforms are written out here because the
// standard library's distributions are implementation-defined, and every
// stochastic path in this project must reproduce bit-for-bit from a seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace hdiv {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Order-sensitive seed combinator for deriving per-(epoch, sample, ...)
// streams from one run seed.
inline uint64_t mix_seed(uint64_t a) { return splitmix64(a); }
template <typename... Rest>
inline uint64_t mix_seed(uint64_t a, uint64_t b, Rest... rest) {
    return mix_seed(splitmix64(a ^ (b + 0x9e3779b97f4a7c15ull)), rest...);
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller, two engine draws per call
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // uniform integer in [lo, hi] (inclusive), rejection-free modulo bias is
    // negligible for the ranges used here but we reject anyway for exactness
    int64_t randint(int64_t lo, int64_t hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t x = eng_();
        while (x >= limit) x = eng_();
        return lo + static_cast<int64_t>(x % span);
    }

    bool coin() { return (eng_() & 1ull) != 0; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(randint(0, static_cast<int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace hdiv
