#pragma once

#include <cstdint>
#include <vector>

#include "bitstring.hpp"

namespace pwm {

/// Marsaglia xorshift64 with shift triple (13, 7, 17).
///
/// This is the reference generator for every reproducible "random" string in
/// the test suites and demos. Bits are drawn most-significant first from each
/// successive 64-bit output. The initial state is splitmix64(seed), replaced
/// by kDefaultSeed in the (unreachable in practice) case that it is zero.
class Xorshift64 {
public:
    static constexpr std::uint64_t kDefaultSeed = 0x9E3779B97F4A7C15ULL;

    explicit Xorshift64(std::uint64_t seed = kDefaultSeed) : state_(splitmix64(seed)) {
        if (state_ == 0) state_ = kDefaultSeed;
    }

    /// Seed scrambler, so that small seeds such as 1 or 2 do not start the
    /// generator in a sparse, visibly non-random state.
    static constexpr std::uint64_t splitmix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }

    BitString bits(std::size_t n) {
        std::vector<std::uint8_t> out(n);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 64 == 0) word = next();
            out[i] = static_cast<std::uint8_t>((word >> (63 - i % 64)) & 1U);
        }
        return BitString(std::move(out));
    }

    /// Uniform-ish value in [0, bound); bound > 0. Modulo bias is irrelevant for test corpora.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

inline BitString random_bits(std::size_t n, std::uint64_t seed = Xorshift64::kDefaultSeed) {
    return Xorshift64(seed).bits(n);
}

} // namespace pwm
