#pragma once

#include <cmath>
#include <cstdint>

// Reproducible RNG: xoshiro256++ seeded through splitmix64. Sub-stream seeds
// are derived by the avalanche mix below, so parallel ensembles are
// deterministic regardless of scheduling.

namespace rw {

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream-seed derivation: mix(master, index) feeds both words through the
// splitmix64 avalanche so nearby indices give unrelated streams.
inline uint64_t mix_seed(uint64_t master, uint64_t stream) {
    uint64_t s = master;
    uint64_t a = splitmix64_next(s);
    s = stream ^ 0xd1b54a32d192ed03ULL;
    uint64_t b = splitmix64_next(s);
    s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64_next(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64_next(s);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never returns 0 so log() is safe.
    double uniform01() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    bool bernoulli(double p) { return uniform01() <= p; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

}  // namespace rw
