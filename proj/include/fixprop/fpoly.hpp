#pragma once

#include <utility>
#include <vector>

#include "field.hpp"

namespace fixprop {

// Dense univariate polynomials with FieldElem coefficients, little-endian.
using FPoly = std::vector<FieldElem>;

inline void fp_trim(FPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

inline int fp_deg(const FPoly& f) { return int(f.size()) - 1; } // -1 for zero

inline FPoly fp_add(const FieldCtx& ctx, FPoly a, const FPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), ctx.zero());
    for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
    fp_trim(a);
    return a;
}

inline FPoly fp_sub(const FieldCtx& ctx, FPoly a, const FPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), ctx.zero());
    for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] - b[i];
    fp_trim(a);
    return a;
}

inline FPoly fp_mul(const FieldCtx& ctx, const FPoly& a, const FPoly& b) {
    if (a.empty() || b.empty()) return {};
    FPoly r(a.size() + b.size() - 1, ctx.zero());
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = r[i + j] + a[i] * b[j];
    }
    fp_trim(r);
    return r;
}

inline FPoly fp_scale(const FPoly& a, const FieldElem& s) {
    FPoly r = a;
    for (auto& c : r) c = c * s;
    fp_trim(r);
    return r;
}

inline std::pair<FPoly, FPoly> fp_divmod(const FieldCtx& ctx, FPoly a, const FPoly& b) {
    fp_trim(a);
    if (b.empty()) raise(errc::zero_element, "polynomial division by zero");
    if (a.size() < b.size()) return {FPoly{}, std::move(a)};
    FieldElem linv = b.back().inverse();
    long db = long(b.size()) - 1;
    FPoly q(a.size() - b.size() + 1, ctx.zero());
    for (long k = long(a.size()) - 1; k >= db; --k) {
        FieldElem coef = a[size_t(k)] * linv;
        if (coef.is_zero()) continue;
        size_t off = size_t(k - db);
        q[off] = coef;
        for (size_t j = 0; j < b.size(); ++j)
            a[off + j] = a[off + j] - coef * b[j];
    }
    fp_trim(a);
    fp_trim(q);
    return {std::move(q), std::move(a)};
}

inline FPoly fp_gcd(const FieldCtx& ctx, FPoly a, FPoly b) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        auto [q, r] = fp_divmod(ctx, std::move(a), b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        FieldElem inv = a.back().inverse();
        for (auto& c : a) c = c * inv;
    }
    return a;
}

inline FPoly fp_derivative(const FieldCtx& ctx, const FPoly& a) {
    if (a.size() <= 1) return {};
    FPoly r(a.size() - 1, ctx.zero());
    for (size_t i = 1; i < a.size(); ++i)
        r[i - 1] = a[i] * ctx.from_int(std::int64_t(i));
    fp_trim(r);
    return r;
}

inline FieldElem fp_eval(const FieldCtx& ctx, const FPoly& a, const FieldElem& x) {
    FieldElem r = ctx.zero();
    for (size_t i = a.size(); i-- > 0;)
        r = r * x + a[i];
    return r;
}

// Multiplicity of x0 as a root (0 if not a root).
inline int fp_root_multiplicity(const FieldCtx& ctx, FPoly f, const FieldElem& x0) {
    fp_trim(f);
    int m = 0;
    FPoly lin{-x0, ctx.one()};
    while (!f.empty() && fp_eval(ctx, f, x0).is_zero()) {
        auto [q, r] = fp_divmod(ctx, std::move(f), lin);
        f = std::move(q);
        ++m;
    }
    return m;
}

// Resultant of two binary forms of common degree d, given as length d+1
// coefficient vectors (coefficient of X^i Y^(d-i) at index i).  Sylvester
// determinant by Gaussian elimination.
inline FieldElem fp_resultant_forms(const FieldCtx& ctx, const FPoly& F, const FPoly& G) {
    size_t d = F.size() - 1;
    size_t n = 2 * d;
    std::vector<FPoly> M(n, FPoly(n, ctx.zero()));
    for (size_t r = 0; r < d; ++r)
        for (size_t j = 0; j <= d; ++j)
            M[r][r + j] = F[d - j];
    for (size_t r = 0; r < d; ++r)
        for (size_t j = 0; j <= d; ++j)
            M[d + r][r + j] = G[d - j];
    FieldElem det = ctx.one();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && M[piv][col].is_zero()) ++piv;
        if (piv == n) return ctx.zero();
        if (piv != col) {
            std::swap(M[piv], M[col]);
            det = -det;
        }
        det = det * M[col][col];
        FieldElem inv = M[col][col].inverse();
        for (size_t r = col + 1; r < n; ++r) {
            if (M[r][col].is_zero()) continue;
            FieldElem f = M[r][col] * inv;
            for (size_t j = col; j < n; ++j)
                M[r][j] = M[r][j] - f * M[col][j];
        }
    }
    return det;
}

} // namespace fixprop
