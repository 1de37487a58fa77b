#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace bugpred {

// Deterministic splitmix64 stream. Every draw is a pure function of the
// seed, independent of platform or standard-library version, so models and
// experiment results reproduce bitwise across runs and worker counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). n must be positive.
    std::size_t next_below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

// Fisher-Yates using the given stream.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.next_below(i);
        std::swap(v[i - 1], v[j]);
    }
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Mixes a salt into a seed; chained calls derive independent substreams
// (per fold, per tree, per permutation, per grid cell).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

}  // namespace bugpred
