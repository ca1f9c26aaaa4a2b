#ifndef ADTNC_RNG_HPP
#define ADTNC_RNG_HPP

#include <cstdint>
#include <random>

namespace adtnc {

// splitmix64 finalizer; used to derive independent sub-seeds so that
// per-trial results do not depend on execution order.
inline uint64_t mix_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Thin wrapper around mt19937_64. Draws of field elements use bit masks
// (field orders are powers of two), so results are identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : base_(seed), eng_(seed) {}

    uint64_t next() { return eng_(); }

    // uniform in [0, 2^width)
    uint32_t bits(unsigned width) {
        return static_cast<uint32_t>(eng_() & ((uint64_t(1) << width) - 1));
    }

    // uniform in [0, n) by rejection
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    Rng derive(uint64_t index) const { return Rng(mix_seed(base_, index)); }

private:
    uint64_t base_;
    std::mt19937_64 eng_;
};

}  // namespace adtnc

#endif
