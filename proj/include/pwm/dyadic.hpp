#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace pwm {

/// Exact non-negative dyadic rational numerator / 2^exponent.
///
/// Kept normalized (numerator odd, or zero with exponent 0) so equal values
/// have identical representations and sums are independent of order.
class Dyadic {
public:
    using Int = boost::multiprecision::cpp_int;

    Dyadic() = default;
    Dyadic(Int numerator, std::int64_t exponent) : num_(std::move(numerator)), exp_(exponent) {
        if (num_ < 0) throw std::invalid_argument("Dyadic: negative numerator");
        normalize();
    }

    /// 2^-bits
    static Dyadic power_of_half(std::int64_t bits) { return Dyadic(1, bits); }

    const Int& numerator() const noexcept { return num_; }
    std::int64_t exponent() const noexcept { return exp_; }
    bool is_zero() const { return num_ == 0; }

    Dyadic& operator+=(const Dyadic& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) return *this = o;
        auto e = std::max(exp_, o.exp_);
        Int a = num_ << static_cast<unsigned>(e - exp_);
        Int b = o.num_ << static_cast<unsigned>(e - o.exp_);
        num_ = a + b;
        exp_ = e;
        normalize();
        return *this;
    }

    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) { return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_); }

    friend bool operator==(const Dyadic&, const Dyadic&) = default;

    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        auto e = std::max(a.exp_, b.exp_);
        Int x = a.num_ << static_cast<unsigned>(e - a.exp_);
        Int y = b.num_ << static_cast<unsigned>(e - b.exp_);
        if (x < y) return std::strong_ordering::less;
        if (x > y) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    double to_double() const { return std::ldexp(num_.convert_to<double>(), static_cast<int>(-exp_)); }

    /// log2 of the value; -inf for zero.
    double log2() const {
        if (is_zero()) return -INFINITY;
        return std::log2(num_.convert_to<double>()) - static_cast<double>(exp_);
    }

    std::string to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

private:
    void normalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        auto tz = static_cast<std::int64_t>(boost::multiprecision::lsb(num_));
        num_ >>= static_cast<unsigned>(tz);
        exp_ -= tz;
    }

    Int num_ = 0;
    std::int64_t exp_ = 0;
};

} // namespace pwm
