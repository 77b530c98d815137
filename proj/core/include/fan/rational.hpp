#pragma once

// Exact rational numbers over 128-bit integers. Every constraint check in the
// IP path compares count ratios with these, so feasibility never depends on a
// float tolerance. Hyperparameters entered as short decimals (0.05, 0.2, ...)
// convert exactly via continued-fraction approximation.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fan {

using i128 = __int128;

namespace detail {
inline i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}
}  // namespace detail

struct Rat {
    i128 num{0};
    i128 den{1};

    constexpr Rat() = default;
    Rat(long long n) : num(n), den(1) {}
    Rat(i128 n, i128 d) : num(n), den(d) {
        if (den == 0) throw std::domain_error("Rat: zero denominator");
        normalize();
    }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        i128 g = detail::gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool is_integer() const { return den == 1; }

    // Nearest rational with denominator <= max_den (Stern-Brocot descent).
    // Recovers decimal inputs like 0.056 exactly from their double image.
    static Rat from_double(double v, long long max_den = 1000000000LL) {
        if (!std::isfinite(v)) throw std::domain_error("Rat::from_double: non-finite value");
        bool neg = v < 0;
        double x = neg ? -v : v;
        i128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
        double frac = x;
        for (int it = 0; it < 64; ++it) {
            double fl = std::floor(frac);
            if (fl > 9.2e18) break;
            i128 a = static_cast<i128>(static_cast<long long>(fl));
            i128 p2 = a * p1 + p0;
            i128 q2 = a * q1 + q0;
            if (q2 > static_cast<i128>(max_den)) break;
            p0 = p1; q0 = q1; p1 = p2; q1 = q2;
            double rem = frac - fl;
            if (rem < 1e-15) break;
            frac = 1.0 / rem;
        }
        Rat r(neg ? -p1 : p1, q1);
        return r;
    }

    friend Rat operator+(const Rat& a, const Rat& b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rat operator-(const Rat& a, const Rat& b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num * b.num, a.den * b.den); }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num == 0) throw std::domain_error("Rat: division by zero");
        return Rat(a.num * b.den, a.den * b.num);
    }
    Rat operator-() const {
        Rat r;
        r.num = -num;
        r.den = den;
        return r;
    }
    Rat& operator+=(const Rat& b) { return *this = *this + b; }
    Rat& operator-=(const Rat& b) { return *this = *this - b; }
    Rat& operator*=(const Rat& b) { return *this = *this * b; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

    Rat abs() const { return num < 0 ? -*this : *this; }

    // floor(num/den) as i128
    i128 floor() const {
        i128 q = num / den;
        if (num % den != 0 && num < 0) --q;
        return q;
    }
    i128 ceil() const {
        i128 q = num / den;
        if (num % den != 0 && num > 0) ++q;
        return q;
    }

    std::string str() const;
};

inline Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }

inline Rat clamp01(const Rat& r) {
    if (r < Rat(0)) return Rat(0);
    if (r > Rat(1)) return Rat(1);
    return r;
}

inline std::string i128_str(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    std::string s;
    while (v != 0) {
        int d = static_cast<int>(neg ? -(v % 10) : (v % 10));
        s.push_back(static_cast<char>('0' + d));
        v /= 10;
    }
    if (neg) s.push_back('-');
    return std::string(s.rbegin(), s.rend());
}

inline std::string Rat::str() const {
    if (den == 1) return i128_str(num);
    return i128_str(num) + "/" + i128_str(den);
}

inline std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace fan
