#pragma once

#include <cstdint>

namespace ladder {

// SplitMix64 step; also used as the stable seed-mixing hash.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_u64(uint64_t a, uint64_t b) {
    uint64_t s = a ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// FNV-1a, used to turn subcommand tags into seed salt.
inline uint64_t hash_str(const char* s) {
    uint64_t h = 1469598103934665603ULL;
    for (; *s; ++s) h = (h ^ static_cast<uint8_t>(*s)) * 1099511628211ULL;
    return h;
}

// xoshiro256++ — small, fast, and identical on every platform we build on.
// std::uniform_* distributions are implementation-defined, so all sampling
// below goes through explicit bit manipulation.
class Rng {
public:
    explicit Rng(uint64_t seed = 0x853c49e6748fea9bULL) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0,...,n-1} by rejection-free multiply-shift (n small here;
    // modulo bias is irrelevant for n << 2^64 but we keep it exact anyway).
    uint64_t next_below(uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
        uint64_t lo = static_cast<uint64_t>(m);
        if (lo < n) {

            uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

// Per-replica seed: stable hash of (master seed, subcommand tag, replica index).
// Workers may pick replicas in any order and still produce identical streams.
inline uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t index) {
    return mix_u64(mix_u64(master, tag), index);
}

} // namespace ladder
