#pragma once

#include <cstdint>
#include <numeric>
#include <string>

namespace fixprop {

// Exact fraction on 64-bit integers. Counts in this project stay below ~10^7,
// so numerators/denominators never approach overflow.
struct Rat64 {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat64() = default;
    Rat64(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    friend Rat64 operator+(Rat64 a, Rat64 b) { return Rat64(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rat64 operator-(Rat64 a, Rat64 b) { return Rat64(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rat64 operator*(Rat64 a, Rat64 b) { return Rat64(a.num * b.num, a.den * b.den); }
    friend Rat64 operator/(Rat64 a, Rat64 b) { return Rat64(a.num * b.den, a.den * b.num); }
    friend bool operator==(const Rat64& a, const Rat64& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const Rat64& a, const Rat64& b) { return !(a == b); }
    friend bool operator<(const Rat64& a, const Rat64& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Rat64& a, const Rat64& b) { return a.num * b.den <= b.num * a.den; }
    friend bool operator>(const Rat64& a, const Rat64& b) { return b < a; }
    friend bool operator>=(const Rat64& a, const Rat64& b) { return b <= a; }

    double to_double() const { return double(num) / double(den); }
    std::string to_string() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

// Rounds num/den to `digits` decimals, ties to even, and renders with a fixed
// number of decimals ("0.750").  Comparisons against published 3-decimal
// tables stay bit-stable this way.
inline std::string decimal_round_even(std::int64_t num, std::int64_t den, int digits) {
    bool neg = false;
    if (num < 0) { neg = true; num = -num; }
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    std::int64_t x = num * scale;
    std::int64_t q = x / den, r = x % den;
    if (2 * r > den || (2 * r == den && (q & 1)))
        ++q;
    std::string frac = std::to_string(q % scale);
    frac.insert(frac.begin(), digits - frac.size(), '0');
    std::string out = std::to_string(q / scale) + "." + frac;
    return neg ? "-" + out : out;
}

inline std::string decimal3(const Rat64& r) { return decimal_round_even(r.num, r.den, 3); }

} // namespace fixprop
