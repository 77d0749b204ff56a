#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fixprop {

// Runtime budgets, overridable through the environment.
struct budgets {
    static std::uint64_t enumeration() {
        static std::uint64_t v = read("FIXPROP_ENUM_BUDGET", 10'000'000ull);
        return v;
    }
    static std::uint64_t degree() {
        static std::uint64_t v = read("FIXPROP_DEGREE_BUDGET", 16384ull);
        return v;
    }
    static int extension_bound() {
        static int v = int(read("FIXPROP_EXT_BOUND", 12ull));
        return v;
    }

private:
    static std::uint64_t read(const char* name, std::uint64_t dflt) {
        const char* s = std::getenv(name);
        if (!s || !*s) return dflt;
        return std::strtoull(s, nullptr, 10);
    }
};

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return std::uint64_t((unsigned __int128)a * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        std::uint64_t x = powmod_u64(a % n, d, n);
        if (x <= 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

// Dense polynomials over F_p, little-endian coefficients, used for modulus
// construction and element reduction.
using PolyP = std::vector<std::uint64_t>;

inline void trim(PolyP& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline PolyP mul(const PolyP& a, const PolyP& b, std::uint64_t p) {
    if (a.empty() || b.empty()) return {};
    PolyP r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + mulmod_u64(a[i], b[j], p)) % p;
    }
    trim(r);
    return r;
}

// Remainder of f modulo monic m.
inline PolyP mod(PolyP f, const PolyP& m, std::uint64_t p) {
    trim(f);
    size_t dm = m.size() - 1;
    while (f.size() > dm) {
        std::uint64_t lead = f.back();
        size_t shift = f.size() - 1 - dm;
        if (lead) {
            for (size_t j = 0; j < dm; ++j)
                f[shift + j] = (f[shift + j] + mulmod_u64(p - m[j], lead, p)) % p;
        }
        f.pop_back();
        trim(f);
        if (f.size() <= dm) break;
    }
    return f;
}

inline PolyP powmod(PolyP base, std::uint64_t e, const PolyP& m, std::uint64_t p) {
    PolyP r{1};
    base = mod(std::move(base), m, p);
    while (e) {
        if (e & 1) r = mod(mul(r, base, p), m, p);
        base = mod(mul(base, base, p), m, p);
        e >>= 1;
    }
    return r;
}

inline PolyP gcd(PolyP a, PolyP b, std::uint64_t p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        // make b monic before reducing
        std::uint64_t inv = powmod_u64(b.back(), p - 2, p);
        PolyP bm = b;
        for (auto& c : bm) c = mulmod_u64(c, inv, p);
        a = mod(std::move(a), bm, p);
        std::swap(a, b);
    }
    if (!a.empty()) {
        std::uint64_t inv = powmod_u64(a.back(), p - 2, p);
        for (auto& c : a) c = mulmod_u64(c, inv, p);
    }
    return a;
}

// Quotient and remainder of a by b (b nonzero, not necessarily monic).
inline std::pair<PolyP, PolyP> divmod(PolyP a, const PolyP& b, std::uint64_t p) {
    trim(a);
    if (a.size() < b.size()) return {PolyP{}, std::move(a)};
    std::uint64_t linv = powmod_u64(b.back(), p - 2, p);
    long db = long(b.size()) - 1;
    PolyP q(a.size() - b.size() + 1, 0);
    for (long k = long(a.size()) - 1; k >= db; --k) {
        std::uint64_t coef = mulmod_u64(a[size_t(k)], linv, p);
        if (!coef) continue;
        size_t off = size_t(k - db);
        q[off] = coef;
        for (size_t j = 0; j < b.size(); ++j)
            a[off + j] = (a[off + j] + mulmod_u64(p - b[j], coef, p)) % p;
    }
    trim(a);
    trim(q);
    return {std::move(q), std::move(a)};
}

// x^(p^k) mod m, by iterating the p-power map.
inline PolyP frobenius_power(const PolyP& m, std::uint64_t p, std::uint32_t k) {
    PolyP g{0, 1};
    g = mod(std::move(g), m, p);
    for (std::uint32_t i = 0; i < k; ++i)
        g = powmod(std::move(g), p, m, p);
    return g;
}

inline bool is_irreducible(const PolyP& f, std::uint64_t p) {
    std::uint32_t n = std::uint32_t(f.size() - 1);
    if (n == 0) return false;
    if (n == 1) return true;
    // x^(p^n) == x mod f
    PolyP xq = frobenius_power(f, p, n);
    PolyP x{0, 1};
    if (mod(PolyP(xq), f, p) != mod(PolyP(x), f, p)) return false;
    // gcd(x^(p^(n/l)) - x, f) == 1 for each prime l | n
    std::uint32_t nn = n;
    for (std::uint32_t l = 2; l * l <= nn; ++l) {
        if (nn % l) continue;
        while (nn % l == 0) nn /= l;
        PolyP g = frobenius_power(f, p, n / l);
        PolyP diff = g;
        diff.resize(std::max<size_t>(diff.size(), 2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(diff);
        if (gcd(diff, f, p).size() != 1) return false;
    }
    if (nn > 1) {
        PolyP g = frobenius_power(f, p, n / nn);
        PolyP diff = g;
        diff.resize(std::max<size_t>(diff.size(), 2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(diff);
        if (gcd(diff, f, p).size() != 1) return false;
    }
    return true;
}

} // namespace detail

class FieldElem;

// A finite field F_{p^n}, presented as F_p[x]/(m) for the canonical modulus m:
// the lexicographically least monic irreducible of degree n, comparing
// coefficient tuples low-degree-first.  The same (p, n) always reproduces the
// same modulus, so elements serialize stably across runs.
class FieldCtx {
public:
    static FieldCtx build(std::uint64_t p, std::uint32_t n) {
        if (!detail::is_prime_u64(p)) raise(errc::not_prime, std::to_string(p) + " is not prime");
        if (n == 0) raise(errc::degree_zero, "extension degree must be >= 1");
        FieldCtx ctx;
        ctx.p_ = p;
        ctx.n_ = n;
        ctx.modulus_ = canonical_modulus(p, n);
        ctx.order_fits_ = true;
        unsigned __int128 ord = 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            ord *= p;
            if (ord > (unsigned __int128)UINT64_MAX) { ctx.order_fits_ = false; break; }
        }
        if (ctx.order_fits_) ctx.order_ = std::uint64_t(ord);
        return ctx;
    }

    std::uint64_t p() const { return p_; }
    std::uint32_t n() const { return n_; }
    const std::vector<std::uint64_t>& modulus() const { return modulus_; }

    bool order_fits() const { return order_fits_; }
    std::uint64_t order() const {
        if (!order_fits_) raise(errc::budget_exceeded, "field order exceeds 64 bits");
        return order_;
    }
    std::uint64_t num_points() const { return order() + 1; } // #P^1

    void check_enumerable() const {
        if (!order_fits_ || order_ > budgets::enumeration())
            raise(errc::budget_exceeded, "field too large to enumerate");
    }

    std::string describe() const {
        if (n_ == 1) return "GF(" + std::to_string(p_) + ")";
        return "GF(" + std::to_string(p_) + "^" + std::to_string(n_) + ")";
    }

    inline FieldElem zero() const;
    inline FieldElem one() const;
    inline FieldElem from_int(std::int64_t v) const;
    inline FieldElem generator() const; // the class of x, n >= 2
    inline FieldElem from_rank(std::uint64_t r) const;

    bool operator==(const FieldCtx& o) const { return p_ == o.p_ && n_ == o.n_; }

private:
    static std::vector<std::uint64_t> canonical_modulus(std::uint64_t p, std::uint32_t n) {
        // Candidates are monic x^n + c_{n-1}x^{n-1} + ... + c_0, scanned in
        // lexicographic order of (c_0, ..., c_{n-1}).  For n >= 2 every
        // irreducible has a nonzero constant term, so the c_0 = 0 block is
        // skipped wholesale.
        std::vector<std::uint64_t> c(n, 0);
        if (n >= 2) c[0] = 1;
        for (;;) {
            detail::PolyP f(c.begin(), c.end());
            f.push_back(1);
            if (detail::is_irreducible(f, p)) return f;
            // increment, last coordinate least significant
            std::int64_t i = std::int64_t(n) - 1;
            while (i >= 0) {
                if (++c[size_t(i)] < p) break;
                c[size_t(i)] = 0;
                --i;
            }
            if (i < 0) raise(errc::not_prime, "no irreducible polynomial found"); // unreachable
        }
    }

    std::uint64_t p_ = 0;
    std::uint32_t n_ = 0;
    std::vector<std::uint64_t> modulus_;
    bool order_fits_ = false;
    std::uint64_t order_ = 0;
};

// Element of F_{p^n}: length-n little-endian coefficient vector over F_p.
class FieldElem {
public:
    FieldElem() = default;
    FieldElem(const FieldCtx* ctx, std::vector<std::uint64_t> coeffs)
        : ctx_(ctx), c_(std::move(coeffs)) {}

    const FieldCtx* ctx() const { return ctx_; }
    const std::vector<std::uint64_t>& coeffs() const { return c_; }

    bool is_zero() const {
        for (auto v : c_)
            if (v) return false;
        return true;
    }
    bool is_one() const {
        if (c_.empty() || c_[0] != 1) return false;
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i]) return false;
        return true;
    }

    std::uint64_t rank() const {
        std::uint64_t r = 0;
        for (size_t i = c_.size(); i-- > 0;)
            r = r * ctx_->p() + c_[i];
        return r;
    }

    friend bool operator==(const FieldElem& a, const FieldElem& b) { return a.c_ == b.c_; }
    friend bool operator!=(const FieldElem& a, const FieldElem& b) { return a.c_ != b.c_; }

    friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
        const std::uint64_t p = a.ctx_->p();
        FieldElem r = a;
        for (size_t i = 0; i < r.c_.size(); ++i) {
            r.c_[i] += b.c_[i];
            if (r.c_[i] >= p) r.c_[i] -= p;
        }
        return r;
    }
    friend FieldElem operator-(const FieldElem& a, const FieldElem& b) {
        const std::uint64_t p = a.ctx_->p();
        FieldElem r = a;
        for (size_t i = 0; i < r.c_.size(); ++i) {
            r.c_[i] += p - b.c_[i];
            if (r.c_[i] >= p) r.c_[i] -= p;
        }
        return r;
    }
    FieldElem operator-() const {
        const std::uint64_t p = ctx_->p();
        FieldElem r = *this;
        for (auto& v : r.c_)
            if (v) v = p - v;
        return r;
    }
    friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
        FieldElem r;
        mul_into(r, a, b);
        return r;
    }
    friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inverse(); }

    static void mul_into(FieldElem& out, const FieldElem& a, const FieldElem& b) {
        const FieldCtx* ctx = a.ctx_;
        const std::uint64_t p = ctx->p();
        const size_t n = a.c_.size();
        thread_local std::vector<std::uint64_t> tmp;
        tmp.assign(2 * n, 0);
        for (size_t i = 0; i < n; ++i) {
            if (!a.c_[i]) continue;
            for (size_t j = 0; j < n; ++j)
                tmp[i + j] = (tmp[i + j] + detail::mulmod_u64(a.c_[i], b.c_[j], p)) % p;
        }
        const auto& m = ctx->modulus();
        for (size_t i = 2 * n - 1; i >= n && i < tmp.size(); --i) {
            std::uint64_t lead = tmp[i];
            if (lead) {
                for (size_t j = 0; j < n; ++j)
                    tmp[i - n + j] = (tmp[i - n + j] + detail::mulmod_u64(p - m[j], lead, p)) % p;
                tmp[i] = 0;
            }
            if (i == n) break;
        }
        out.ctx_ = ctx;
        out.c_.assign(tmp.begin(), tmp.begin() + long(n));
    }

    FieldElem inverse() const {
        if (is_zero()) raise(errc::zero_element, "division by zero in " + ctx_->describe());
        // extended Euclid on (modulus, this); tracks only the cofactor of this
        const std::uint64_t p = ctx_->p();
        detail::PolyP r0 = ctx_->modulus();
        detail::PolyP r1(c_.begin(), c_.end());
        detail::trim(r1);
        detail::PolyP s0{}, s1{1};
        while (r1.size() > 1) {
            auto [q, rem] = detail::divmod(std::move(r0), r1, p);
            detail::PolyP qs = detail::mul(q, s1, p);
            detail::PolyP s2 = s0;
            s2.resize(std::max(s2.size(), qs.size()), 0);
            for (size_t i = 0; i < qs.size(); ++i)
                s2[i] = (s2[i] + p - qs[i]) % p;
            detail::trim(s2);
            r0 = std::move(r1);
            r1 = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        if (r1.empty()) raise(errc::zero_element, "non-invertible element"); // cannot happen in a field
        std::uint64_t scale = detail::powmod_u64(r1[0], p - 2, p);
        std::vector<std::uint64_t> out(ctx_->n(), 0);
        for (size_t i = 0; i < s1.size() && i < out.size(); ++i)
            out[i] = detail::mulmod_u64(s1[i], scale, p);
        return FieldElem(ctx_, std::move(out));
    }

    FieldElem pow(std::uint64_t e) const {
        FieldElem base = *this, r = ctx_->one();
        while (e) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

private:
    const FieldCtx* ctx_ = nullptr;
    std::vector<std::uint64_t> c_;
};

inline FieldElem FieldCtx::zero() const { return FieldElem(this, std::vector<std::uint64_t>(n_, 0)); }
inline FieldElem FieldCtx::one() const { return from_int(1); }
inline FieldElem FieldCtx::from_int(std::int64_t v) const {
    std::int64_t m = v % std::int64_t(p_);
    if (m < 0) m += std::int64_t(p_);
    std::vector<std::uint64_t> c(n_, 0);
    c[0] = std::uint64_t(m);
    return FieldElem(this, std::move(c));
}
inline FieldElem FieldCtx::generator() const {
    if (n_ < 2) raise(errc::wrong_degree, "generator t requires an extension field");
    std::vector<std::uint64_t> c(n_, 0);
    c[1] = 1;
    return FieldElem(this, std::move(c));
}
inline FieldElem FieldCtx::from_rank(std::uint64_t r) const {
    std::vector<std::uint64_t> c(n_, 0);
    for (std::uint32_t i = 0; i < n_; ++i) {
        c[i] = r % p_;
        r /= p_;
    }
    return FieldElem(this, std::move(c));
}

// x -> x^p
inline FieldElem frobenius(const FieldElem& e) { return e.pow(e.ctx()->p()); }

// Least k >= 1 with e^(q^k) = e, where q = p^base_m.  With base_m = 1 this is
// the degree of the minimal polynomial of e over the prime field.
inline std::uint32_t element_degree(const FieldElem& e, std::uint32_t base_m = 1) {
    std::uint32_t t = 0;
    FieldElem cur = e;
    do {
        cur = frobenius(cur);
        ++t;
    } while (cur != e && t <= e.ctx()->n());
    // relative degree over F_{p^base_m}: least k with base_m*k divisible by t
    return t / std::gcd(t, base_m);
}

// Visits every element exactly once, ranks ascending.
template <typename F>
inline void enumerate_field(const FieldCtx& ctx, F&& visit) {
    ctx.check_enumerable();
    std::uint64_t q = ctx.order();
    for (std::uint64_t r = 0; r < q; ++r)
        visit(ctx.from_rank(r));
}

// All square roots of a, ranks ascending (enumeration-scale fields only).
inline std::vector<FieldElem> sqrts(const FieldCtx& ctx, const FieldElem& a) {
    ctx.check_enumerable();
    std::vector<FieldElem> out;
    std::uint64_t q = ctx.order();
    for (std::uint64_t r = 0; r < q; ++r) {
        FieldElem y = ctx.from_rank(r);
        if (y * y == a) out.push_back(y);
    }
    return out;
}

// Euler criterion; q must fit in 64 bits.
inline bool is_square(const FieldElem& a) {
    if (a.is_zero()) return true;
    std::uint64_t q = a.ctx()->order();
    return a.pow((q - 1) / 2).is_one();
}

// Inverts all invertible entries with one field inversion (Montgomery batch
// trick); zero entries are left as zero and flagged false.
inline void batch_invert(const FieldCtx& ctx, std::vector<FieldElem>& xs, std::vector<char>& ok) {
    size_t n = xs.size();
    ok.assign(n, 1);
    std::vector<FieldElem> prefix(n);
    FieldElem acc = ctx.one();
    for (size_t i = 0; i < n; ++i) {
        if (xs[i].is_zero()) {
            ok[i] = 0;
            prefix[i] = acc;
            continue;
        }
        prefix[i] = acc;
        acc = acc * xs[i];
    }
    FieldElem inv = acc.inverse();
    for (size_t i = n; i-- > 0;) {
        if (!ok[i]) continue;
        FieldElem xi = xs[i];
        xs[i] = inv * prefix[i];
        inv = inv * xi;
    }
}

// Field specifier grammar: GF(p) or GF(p^n).
inline FieldCtx parse_field_spec(const std::string& s) {
    auto fail = [&](size_t pos, const std::string& msg) {
        raise(errc::parse_error, "field spec '" + s + "' at position " + std::to_string(pos) + ": " + msg);
    };
    size_t i = 0;
    auto expect = [&](char c) {
        if (i >= s.size() || s[i] != c) fail(i, std::string("expected '") + c + "'");
        ++i;
    };
    expect('G');
    expect('F');
    expect('(');
    size_t start = i;
    while (i < s.size() && isdigit((unsigned char)s[i])) ++i;
    if (i == start) fail(i, "expected prime");
    std::uint64_t p = std::strtoull(s.substr(start, i - start).c_str(), nullptr, 10);
    std::uint64_t n = 1;
    if (i < s.size() && s[i] == '^') {
        ++i;
        start = i;
        while (i < s.size() && isdigit((unsigned char)s[i])) ++i;
        if (i == start) fail(i, "expected exponent");
        n = std::strtoull(s.substr(start, i - start).c_str(), nullptr, 10);
    }
    expect(')');
    if (i != s.size()) fail(i, "trailing characters");
    return FieldCtx::build(p, std::uint32_t(n));
}

} // namespace fixprop
