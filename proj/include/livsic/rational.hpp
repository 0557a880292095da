#ifndef LIVSIC_RATIONAL_HPP
#define LIVSIC_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "livsic/errors.hpp"

namespace livsic {

/// Exact rational on 64-bit numerator/denominator, with 128-bit
/// intermediates.  Denominators stay small here (divisors of
/// det(M^n - I)), so overflow is checked, not mitigated.
class Rat {
public:
    Rat() = default;
    Rat(std::int64_t n) : num_(n), den_(1) {}
    Rat(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return double(num_) / double(den_); }

    Rat operator-() const { return Rat(-num_, den_, tag{}); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                    i128(a.den_) * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw NonFinite("rational division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }

    /// Representative in [0,1).
    Rat mod1() const {
        std::int64_t r = num_ % den_;
        if (r < 0) r += den_;
        return Rat(r, den_, tag{});
    }

    /// Representative in [-1/2, 1/2): the minimal lift of a torus difference.
    Rat lift_half() const {
        Rat m = mod1();
        if (Rat(1, 2) <= m) return m - Rat(1);
        return m;
    }

    std::string str() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
        return os << r.str();
    }

private:
    using i128 = __int128;
    struct tag {};
    Rat(std::int64_t n, std::int64_t d, tag) : num_(n), den_(d) {}

    static Rat make(i128 n, i128 d) {
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr i128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim)
            throw NonFinite("rational overflow");
        return Rat(std::int64_t(n), std::int64_t(d), tag{});
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (den_ == 0) throw NonFinite("zero denominator");
        *this = make(num_, den_);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace livsic

#endif
