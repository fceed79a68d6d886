#pragma once

#include "aequiv/error.hpp"

#include <cstdint>
#include <numeric>
#include <string>

namespace aeq {

// Exact fraction of 64-bit integers, always reduced with a positive denominator.
// Overflow is checked on every operation.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
        require(den != 0, ErrorKind::InvalidArgument, "zero denominator");
        normalize();
    }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        std::int64_t g = std::gcd(a.den_, b.den_);
        std::int64_t left = mul(a.num_, b.den_ / g), right = mul(b.num_, a.den_ / g);
        std::int64_t num = 0;
        require(!__builtin_add_overflow(left, right, &num), ErrorKind::SizeLimit, "rational overflow");
        return {num, mul(a.den_ / g, b.den_)};
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        std::int64_t g1 = std::gcd(a.num_, b.den_), g2 = std::gcd(b.num_, a.den_);
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        return {mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1)};
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        require(b.num_ != 0, ErrorKind::InvalidArgument, "division by zero");
        return a * Rational(b.den_, b.num_);
    }
    friend Rational operator-(const Rational& a) { return {-a.num_, a.den_}; }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend bool operator==(const Rational& a, const Rational& b) = default;

private:
    static std::int64_t mul(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        require(!__builtin_mul_overflow(a, b, &out), ErrorKind::SizeLimit, "rational overflow");
        return out;
    }
    void normalize() {
        if (den_ < 0) num_ = -num_, den_ = -den_;
        std::int64_t g = std::gcd(num_, den_);
        if (g > 1) num_ /= g, den_ /= g;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace aeq
