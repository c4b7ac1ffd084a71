#pragma once

#include <cstdint>
#include <random>

namespace rankident {

// splitmix64 step; used to derive independent stream seeds from a master
// seed so that per-replication results do not depend on thread scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    s ^= c + 0x8cb92ba72f3d8dd7ULL;
    h ^= splitmix64(s);
    return h;
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
    return std::mt19937_64(derive_seed(seed, a, b, c));
}

// Uniform double in [0,1) with 53 random bits; avoids the
// implementation-defined behavior of std::generate_canonical.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Number of successes in n Bernoulli(p) trials, by direct simulation.
// Counts are small here, and this keeps draws identical across platforms.
inline long long draw_binomial(std::mt19937_64& rng, long long n, double p) {
    long long wins = 0;
    for (long long i = 0; i < n; ++i) wins += uniform01(rng) < p;
    return wins;
}

}  // namespace rankident
