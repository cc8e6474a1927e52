#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwm {

/// Immutable sequence of binary digits. One byte per bit; values are 0 or 1.
class BitString {
public:
    BitString() = default;

    explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto b : bits_) {
            if (b > 1) throw std::invalid_argument("BitString: digit outside {0,1}");
        }
    }

    /// Parses "0"/"1" text. Any other character is rejected.
    static BitString from_text(std::string_view text) {
        std::vector<std::uint8_t> bits;
        bits.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("BitString: expected '0' or '1', got '" + std::string(1, c) + "'");
            }
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return BitString(std::move(bits));
    }

    /// Big-endian fixed-width encoding of an unsigned value.
    static BitString from_uint(std::uint64_t value, unsigned width) {
        std::vector<std::uint8_t> bits(width);
        for (unsigned i = 0; i < width; ++i) {
            unsigned shift = width - 1 - i;
            bits[i] = shift < 64 ? static_cast<std::uint8_t>((value >> shift) & 1U) : 0;
        }
        return BitString(std::move(bits));
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::string to_text() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
        return s;
    }

    /// Big-endian value of [pos, pos+width). width <= 64.
    std::uint64_t to_uint(std::size_t pos, unsigned width) const {
        if (width > 64 || pos + width > bits_.size()) throw std::out_of_range("BitString::to_uint");
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | bits_[pos + i];
        return v;
    }

    BitString slice(std::size_t pos, std::size_t len) const {
        if (pos > bits_.size() || len > bits_.size() - pos) throw std::out_of_range("BitString::slice");
        return BitString(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                                   bits_.begin() + static_cast<std::ptrdiff_t>(pos + len)));
    }

    BitString with_flipped(std::size_t i) const {
        auto copy = bits_;
        copy.at(i) ^= 1U;
        return BitString(std::move(copy));
    }

    friend BitString operator+(const BitString& a, const BitString& b) {
        std::vector<std::uint8_t> out;
        out.reserve(a.size() + b.size());
        out.insert(out.end(), a.bits_.begin(), a.bits_.end());
        out.insert(out.end(), b.bits_.begin(), b.bits_.end());
        return BitString(std::move(out));
    }

    friend bool operator==(const BitString&, const BitString&) = default;

    /// Shortlex order: shorter strings first, then lexicographic.
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
        if (auto c = a.size() <=> b.size(); c != 0) return c;
        return a.bits_ <=> b.bits_;
    }

private:
    std::vector<std::uint8_t> bits_;
};

/// Append-only builder for BitString.
class BitWriter {
public:
    void put(unsigned bit) { bits_.push_back(static_cast<std::uint8_t>(bit & 1U)); }

    /// Writes the low `width` bits of value, most significant first.
    void put_uint(std::uint64_t value, unsigned width) {
        for (unsigned i = width; i-- > 0;) put(i < 64 ? static_cast<unsigned>((value >> i) & 1U) : 0U);
    }

    void put(const BitString& s) { bits_.insert(bits_.end(), s.bits().begin(), s.bits().end()); }

    std::size_t size() const noexcept { return bits_.size(); }

    BitString finish() && { return BitString(std::move(bits_)); }

private:
    std::vector<std::uint8_t> bits_;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bits) : bits_(bits) {}

    bool exhausted() const noexcept { return pos_ >= bits_.size(); }
    std::size_t remaining() const noexcept { return bits_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }

    unsigned get() {
        if (exhausted()) throw std::out_of_range("BitReader: read past end");
        return bits_[pos_++];
    }

    std::uint64_t get_uint(unsigned width) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | get();
        return v;
    }

private:
    std::span<const std::uint8_t> bits_;
    std::size_t pos_ = 0;
};

} // namespace pwm

template <>
struct std::hash<pwm::BitString> {
    std::size_t operator()(const pwm::BitString& s) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto b : s.bits()) {
            h ^= b;
            h *= 1099511628211ULL;
        }
        h ^= s.size();
        h *= 1099511628211ULL;
        return static_cast<std::size_t>(h);
    }
};
