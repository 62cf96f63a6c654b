#pragma once

#include <cmath>
#include <cstdint>

namespace mbl {

// splitmix64 finalizer. Bit-exact on every platform, unlike the
// standard-library distributions, so it backs all seeded sampling here.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Counter-based generator: draw i of the stream keyed by `key` is a pure
// function of (key, i), so parallel consumers see the same values
// regardless of scheduling.
inline uint64_t counter_rng(uint64_t key, uint64_t counter) {
    return mix64(key + counter * 0x9e3779b97f4a7c15ULL);
}

// Sequential stream with the same mixing core.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(mix64(seed)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    uint64_t next_below(uint64_t n) { return n ? next_u64() % n : 0; }

    // Standard normal via Box-Muller (two draws per call, no caching so the
    // stream position stays a pure function of call count).
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Derive an independent child stream.
    Rng fork(uint64_t salt) const { return Rng(hash_combine(state_, salt)); }

  private:
    uint64_t state_;
};

} // namespace mbl
