#pragma once

#include <cstdint>

#include <gmpxx.h>

namespace galrep {

// Small deterministic PRNG (splitmix64 core). Results are identical on every
// platform, which keeps seeded searches reproducible; std::mt19937 plus the
// standard distributions would not give that guarantee.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by rejection.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t lim = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= lim);
        return x % bound;
    }

    // Uniform in [0, bound) for big bounds: assemble 64-bit limbs, reject.
    mpz_class below(const mpz_class& bound) {
        if (bound <= 1) return 0;
        size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        while (true) {
            mpz_class x = 0;
            for (size_t have = 0; have < bits; have += 64) {
                x <<= 64;
                x += mpz_class(static_cast<unsigned long>(next_u64() >> 32)) << 32
                     | static_cast<unsigned long>(next_u64() & 0xffffffffULL);
            }
            x >>= (64 * ((bits + 63) / 64) - bits);
            if (x < bound) return x;
        }
    }

    // Child generator for worker `index`; deterministic per (seed, index).
    Rng fork(uint64_t index) const {
        Rng child(state_ ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        child.next_u64();
        return child;
    }

private:
    uint64_t state_;
};

}  // namespace galrep
