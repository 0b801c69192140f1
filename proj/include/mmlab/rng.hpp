#pragma once

#include <cmath>
#include <cstdint>

namespace mmlab {

// SplitMix64 step (Steele, Lea & Flood reference constants). Advances the
// state and returns the mixed output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic substream derivation: the seed of stream `stream` under
// `master`. Replica r of a run seeded with S uses hash64(S, r), sweep point i
// uses hash64(S, i), and so on. Two mixing rounds so that neither nearby
// masters nor nearby stream indices produce correlated states.
inline std::uint64_t hash64(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64_next(s);
    s = a ^ stream;
    return splitmix64_next(s);
}

// xoshiro256++ (Blackman & Vigna). Seeded through SplitMix64 per the authors'
// recommendation; never yields the all-zero state.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64_next(s);
    }

    std::uint64_t next() {
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

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Exponential holding time; -log1p(-u) keeps u = 0 finite.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

} // namespace mmlab
