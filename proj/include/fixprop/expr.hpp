#pragma once

#include <cctype>
#include <cerrno>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "fpoly.hpp"

namespace fixprop {

// Integer polynomials in x whose coefficients are themselves small integer
// polynomials in t (t stands for the generator of an extension field; maps
// with plain integer coefficients never use it).  Exact integers are kept so
// the same map can be reduced modulo any prime.
using ZtCoeff = std::vector<std::int64_t>;   // little-endian in t
using ZtPoly = std::vector<ZtCoeff>;         // little-endian in x

struct RationalMapZ {
    ZtPoly num, den;
    std::string source;

    bool uses_generator() const {
        auto chk = [](const ZtPoly& f) {
            for (const auto& c : f)
                if (c.size() > 1) return true;
            return false;
        };
        return chk(num) || chk(den);
    }
    int degree() const {
        return std::max(int(num.size()) - 1, int(den.size()) - 1);
    }
};

namespace exprdetail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b, size_t pos) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) raise(errc::parse_error, "coefficient overflow at position " + std::to_string(pos));
    return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b, size_t pos) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) raise(errc::parse_error, "coefficient overflow at position " + std::to_string(pos));
    return r;
}

inline void zt_trim(ZtCoeff& c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
}
inline void zp_trim(ZtPoly& f) {
    for (auto& c : f) zt_trim(c);
    while (!f.empty() && f.back().empty()) f.pop_back();
}

inline ZtCoeff zt_add(const ZtCoeff& a, const ZtCoeff& b, size_t pos) {
    ZtCoeff r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = checked_add(r[i], b[i], pos);
    zt_trim(r);
    return r;
}
inline ZtCoeff zt_mul(const ZtCoeff& a, const ZtCoeff& b, size_t pos) {
    if (a.empty() || b.empty()) return {};
    ZtCoeff r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = checked_add(r[i + j], checked_mul(a[i], b[j], pos), pos);
    zt_trim(r);
    return r;
}

inline ZtPoly zp_add(const ZtPoly& a, const ZtPoly& b, size_t pos) {
    ZtPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < r.size(); ++i) {
        ZtCoeff ca = i < a.size() ? a[i] : ZtCoeff{};
        ZtCoeff cb = i < b.size() ? b[i] : ZtCoeff{};
        r[i] = zt_add(ca, cb, pos);
    }
    zp_trim(r);
    return r;
}
inline ZtPoly zp_neg(ZtPoly a) {
    for (auto& c : a)
        for (auto& v : c) v = -v;
    return a;
}
inline ZtPoly zp_mul(const ZtPoly& a, const ZtPoly& b, size_t pos) {
    if (a.empty() || b.empty()) return {};
    ZtPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = zt_add(r[i + j], zt_mul(a[i], b[j], pos), pos);
    zp_trim(r);
    return r;
}

// Rational function with ZtPoly numerator/denominator.
struct RF {
    ZtPoly num, den;
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    RF parse() {
        RF r = expression();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character");
        exprdetail::zp_trim(r.num);
        exprdetail::zp_trim(r.den);
        if (r.den.empty()) fail("zero denominator");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        raise(errc::parse_error,
              "map expression '" + s_ + "' at position " + std::to_string(pos_) + ": " + msg);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    static RF constant(std::int64_t v) {
        RF r;
        if (v != 0) r.num = {{v}};
        r.den = {{1}};
        return r;
    }

    RF expression() {
        RF acc = term();
        for (;;) {
            if (eat('+')) {
                RF t = term();
                acc = add(acc, t, +1);
            } else if (eat('-')) {
                RF t = term();
                acc = add(acc, t, -1);
            } else
                return acc;
        }
    }
    RF term() {
        RF acc = factor();
        for (;;) {
            if (eat('*')) {
                RF t = factor();
                acc.num = zp_mul(acc.num, t.num, pos_);
                acc.den = zp_mul(acc.den, t.den, pos_);
            } else if (eat('/')) {
                RF t = factor();
                if (zp_trivially_zero(t.num)) fail("division by zero");
                acc.num = zp_mul(acc.num, t.den, pos_);
                acc.den = zp_mul(acc.den, t.num, pos_);
            } else
                return acc;
        }
    }
    RF factor() {
        skip_ws();
        bool neg = false;
        while (eat('-')) neg = !neg;
        RF base = atom();
        if (eat('^')) {
            skip_ws();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            if (pos_ == start) fail("expected exponent");
            std::uint64_t e = std::strtoull(s_.substr(start, pos_ - start).c_str(), nullptr, 10);
            if (e > 64) fail("exponent too large");
            RF r = constant(1);
            for (std::uint64_t i = 0; i < e; ++i) {
                r.num = zp_mul(r.num, base.num, pos_);
                r.den = zp_mul(r.den, base.den, pos_);
            }
            base = r;
        }
        if (neg) base.num = zp_neg(base.num);
        return base;
    }
    RF atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            RF r = expression();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (c == 'x') {
            ++pos_;
            RF r;
            r.num = {{}, {1}};
            r.den = {{1}};
            return r;
        }
        if (c == 't') {
            ++pos_;
            RF r;
            r.num = {{0, 1}};
            r.den = {{1}};
            return r;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            errno = 0;
            std::int64_t v = std::strtoll(s_.substr(start, pos_ - start).c_str(), nullptr, 10);
            if (errno == ERANGE) fail("integer literal overflow");
            return constant(v);
        }
        fail("expected integer, x, t, or '('");
    }

    static bool zp_trivially_zero(const ZtPoly& f) {
        for (const auto& c : f)
            for (auto v : c)
                if (v) return false;
        return true;
    }
    static RF add(const RF& a, const RF& b, int sign) {
        RF r;
        ZtPoly bn = sign < 0 ? zp_neg(b.num) : b.num;
        r.num = zp_add(zp_mul(a.num, b.den, 0), zp_mul(bn, a.den, 0), 0);
        r.den = zp_mul(a.den, b.den, 0);
        return r;
    }

    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace exprdetail

// Map expression grammar: integer-coefficient polynomials in x combined with
// + - * / ^ and parentheses; division normally appears once at top level.
// `t` names the generator when the target field is a proper extension.
inline RationalMapZ parse_map_expr(const std::string& s) {
    exprdetail::Parser p(s);
    auto rf = p.parse();
    RationalMapZ m;
    m.num = std::move(rf.num);
    m.den = std::move(rf.den);
    m.source = s;
    if (m.num.empty() && m.den.empty()) raise(errc::parse_error, "empty map expression");
    return m;
}

// Reduce a ZtCoeff at t = generator of ctx (or constant embedding).
inline FieldElem reduce_coeff(const FieldCtx& ctx, const ZtCoeff& c) {
    FieldElem r = ctx.zero();
    if (c.empty()) return r;
    if (c.size() > 1 && ctx.n() < 2)
        raise(errc::parse_error, "map uses generator t but field " + ctx.describe() + " is prime");
    FieldElem t = ctx.n() >= 2 ? ctx.generator() : ctx.zero();
    for (size_t i = c.size(); i-- > 0;)
        r = r * t + ctx.from_int(c[i]);
    return r;
}

inline FPoly reduce_poly(const FieldCtx& ctx, const ZtPoly& f) {
    FPoly r;
    r.reserve(f.size());
    for (const auto& c : f) r.push_back(reduce_coeff(ctx, c));
    // deliberately not trimmed: degree bookkeeping happens at the map level
    return r;
}

} // namespace fixprop
