#pragma once

// Elias universal codes for positive integers.

#include <bit>
#include <cstdint>
#include <stdexcept>

#include "bitstring.hpp"

namespace pwm::codes {

inline unsigned floor_log2(std::uint64_t n) { return static_cast<unsigned>(std::bit_width(n) - 1); }

/// Bits needed to write an index in [0, count). Zero when count <= 1.
inline unsigned index_width(std::uint64_t count) {
    return count <= 1 ? 0U : static_cast<unsigned>(std::bit_width(count - 1));
}

inline std::size_t gamma_length(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Elias gamma is defined for n >= 1");
    return 2 * floor_log2(n) + 1;
}

inline void put_gamma(BitWriter& w, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Elias gamma is defined for n >= 1");
    unsigned k = floor_log2(n);
    for (unsigned i = 0; i < k; ++i) w.put(0);
    w.put_uint(n, k + 1);
}

inline std::uint64_t get_gamma(BitReader& r) {
    unsigned zeros = 0;
    while (r.get() == 0) {
        if (++zeros > 63) throw std::runtime_error("Elias gamma: code too long");
    }
    std::uint64_t n = 1;
    for (unsigned i = 0; i < zeros; ++i) n = (n << 1) | r.get();
    return n;
}

inline std::size_t delta_length(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Elias delta is defined for n >= 1");
    unsigned len = floor_log2(n) + 1;
    return gamma_length(len) + len - 1;
}

inline void put_delta(BitWriter& w, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Elias delta is defined for n >= 1");
    unsigned len = floor_log2(n) + 1;
    put_gamma(w, len);
    w.put_uint(n, len - 1);
}

inline std::uint64_t get_delta(BitReader& r) {
    auto len = get_gamma(r);
    if (len > 64) throw std::runtime_error("Elias delta: length field too large");
    std::uint64_t n = 1;
    for (std::uint64_t i = 1; i < len; ++i) n = (n << 1) | r.get();
    return n;
}

} // namespace pwm::codes
