#pragma once

#include <cstdint>
#include <initializer_list>

namespace mcsched {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for a (master, i, j, ...) path. Used to give every trial of an
/// experiment its own stream independent of evaluation order.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path) {
    uint64_t s = master;
    uint64_t out = splitmix64(s);
    for (uint64_t p : path) {
        s = out ^ (p * 0xd1b54a32d192ed03ULL);
        out = splitmix64(s);
    }
    return out;
}

/// xoshiro256** seeded through splitmix64. Fixed for reproducibility: do not
/// swap for std engines, whose distributions differ between standard
/// libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        for (auto& w : s_) w = splitmix64(seed);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], unbiased.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<int64_t>(next());
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t x;
        do x = next();
        while (x >= limit);
        return lo + static_cast<int64_t>(x % span);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace mcsched
