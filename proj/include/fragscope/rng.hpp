#pragma once

#include <cmath>
#include <cstdint>

namespace fragscope {

// All random streams in the toolkit go through this header. The standard
// library distributions are implementation-defined, so to keep archived
// results byte-stable we roll the few samplers we need on top of
// xoshiro256++ with splitmix64 seeding.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Finalizer of splitmix64; a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-mode stream derivation: collision-free in the index for a fixed
// master (mix64 is bijective and the inner term is injective in i).
// Frozen: archived results depend on it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_index) {
    return mix64(master ^ (mix64(stream_index + 1) + 0x9E3779B97F4A7C15ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) (Lemire multiply-shift with rejection).
    std::uint64_t uniform_below(std::uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Exponential with the given rate; uses -log1p(-U) so U == 0 is safe.
    double exponential(double rate = 1.0) { return -std::log1p(-uniform01()) / rate; }

    // Poisson count by accumulating unit-exponential gaps. Exact; O(mean).
    std::uint64_t poisson(double mean) {
        std::uint64_t count = 0;
        double acc = exponential();
        while (acc <= mean) {
            ++count;
            acc += exponential();
        }
        return count;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

} // namespace fragscope
