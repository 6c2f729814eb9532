#pragma once

#include <cstdint>

namespace ltkit {

// Stateless 64-bit finalizer (the output stage of splitmix64). Good avalanche,
// used both for seed expansion and for deriving independent stream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for logical stream (a, b) of a master seed. The Monte Carlo harness
// passes (epsilon_index, trial_index) so every trial gets its own generator
// and results do not depend on scheduling or trial order.
inline constexpr std::uint64_t derive_stream_seed(std::uint64_t master,
                                                  std::uint64_t a,
                                                  std::uint64_t b = 0) noexcept {
    std::uint64_t z = mix64(master + 0x9e3779b97f4a7c15ULL);
    z = mix64(z ^ mix64(a + 0xbf58476d1ce4e5b9ULL));
    z = mix64(z ^ mix64(b + 0x94d049bb133111ebULL));
    return z;
}

// xoshiro256** by Blackman & Vigna. Self-contained so that streams are
// reproducible byte-for-byte across platforms and standard library versions
// (std::mt19937 would be portable too, but distributions are not).
class Xoshiro256StarStar {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed = 0) noexcept {
        // splitmix64 expansion, per the reference implementation's advice.
        std::uint64_t sm = seed;
        for (auto& word : s_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = mix64(sm);
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    std::uint64_t operator()() noexcept { return next(); }
    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~0ULL; }

    // Unbiased integer in [0, n). Rejection on the low bits, Lemire-style
    // threshold (0 - n) % n == 2^64 mod n.
    std::uint64_t uniform_below(std::uint64_t n) noexcept {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

using Rng = Xoshiro256StarStar;

}  // namespace ltkit
