#pragma once

#include <cstdint>

namespace ringvec {

// splitmix64: 64-bit state, one multiply-xor chain per draw. Small enough to
// hand one generator to every (worker, batch) pair; derive() folds stream
// coordinates into the seed so streams are independent and reproducible on
// any platform.
class Rng {
public:
    explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ULL) : state_(mix(seed)) {}

    // Independent stream keyed by (seed, a, b, c).
    static Rng derive(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
        Rng r(seed);
        r.state_ = mix(r.state_ ^ mix(a + 0x9e3779b97f4a7c15ULL));
        r.state_ = mix(r.state_ ^ mix(b + 0xbf58476d1ce4e5b9ULL));
        r.state_ = mix(r.state_ ^ mix(c + 0x94d049bb133111ebULL));
        return r;
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, n). Modulo bias is below 1e-12 for n up to 1e7.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    float next_float() { return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f; }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

} // namespace ringvec
