#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dynamics.hpp"

namespace fixprop {

using boost::multiprecision::cpp_int;

// Z[i] with arbitrary-precision parts.
struct GaussianInt {
    cpp_int re, im;

    friend GaussianInt operator*(const GaussianInt& a, const GaussianInt& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianInt operator+(const GaussianInt& a, const GaussianInt& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianInt operator-(const GaussianInt& a, const GaussianInt& b) {
        return {a.re - b.re, a.im - b.im};
    }
    cpp_int norm() const { return re * re + im * im; }
    GaussianInt conj() const { return {re, -im}; }
    GaussianInt pow(int n) const {
        GaussianInt r{1, 0}, base = *this;
        while (n) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }
    std::string to_string() const {
        std::string s = re.str();
        if (im >= 0) s += "+" + im.str() + "i";
        else s += im.str() + "i";
        return s;
    }
};

// v_p(z) for the ramified prime p = (1+i) over 2: the 2-adic valuation of
// the norm.
inline int wp_valuation(const GaussianInt& z) {
    if (z.re == 0 && z.im == 0) raise(errc::zero_element, "valuation of zero");
    cpp_int n = z.norm();
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    return v;
}

// #E(F_p) for y^2 = x^3 + x, by quadratic-residue loop.
inline std::uint64_t count_curve_points(std::uint64_t p) {
    if (p % 4 != 1) raise(errc::wrong_residue_class, "p must be 1 mod 4");
    if (p > 1'000'000) raise(errc::budget_exceeded, "curve counting loop capped at 10^6");
    std::vector<char> sq(p, 0);
    for (std::uint64_t y = 0; y < p; ++y) sq[detail::mulmod_u64(y, y, p)] = 1;
    std::uint64_t count = 1; // point at infinity
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t rhs = (detail::mulmod_u64(detail::mulmod_u64(x, x, p), x, p) + x) % p;
        if (rhs == 0)
            count += 1;
        else if (sq[rhs])
            count += 2;
    }
    return count;
}

// Frobenius pi = a + bi with 2a = r (the trace) and norm p; the positive
// square root is chosen for b.
inline GaussianInt frobenius_pi(std::uint64_t p, std::int64_t r) {
    if (r % 2 != 0) raise(errc::not_a_square, "trace must be even under CM by Z[i]");
    std::int64_t a = r / 2;
    std::int64_t rad = std::int64_t(p) - a * a;
    if (rad < 0) raise(errc::not_a_square, "trace violates the Hasse bound");
    std::int64_t b = std::int64_t(std::sqrt(double(rad)));
    while (b * b < rad) ++b;
    while (b > 0 && b * b > rad) --b;
    if (b * b != rad) raise(errc::not_a_square, "p - (r/2)^2 is not a perfect square");
    GaussianInt pi{a, b};
    if (pi.norm() != cpp_int(p)) raise(errc::not_a_square, "norm check failed");
    return pi;
}

// Per-level audit data for psi(x) = k(x + 1/x), k^2 = -1/4.
struct LattesLevel {
    int n = 0;
    std::uint64_t total = 0; // p^n + 1
    std::uint64_t size_a = 0, size_b = 0;
    bool sqrt2_in_field = false;
    int v_minus = 0; // v_p(pi^n - 1), the A-side tree depth
    int v_plus = 0;  // v_p(pi^n + 1), the B-side tree depth
    std::uint64_t periodic_a = 0, periodic_b = 0;
    Rat64 proportion;
    bool invariance_ok = false;
    bool tree_audit_ok = false;
    bool proportion_ok = false;        // >= 1/8 overall
    bool side_proportion_ok = false;   // >= 1/4 on the small-valuation side
    bool hasse_ok = false;
    std::string tree_audit_note;
};

struct LattesReport {
    std::uint64_t p = 0;
    std::uint64_t curve_points = 0;
    std::int64_t trace = 0;
    GaussianInt pi;
    std::uint64_t k_rank = 0; // chosen square root of -1/4 in F_p
    std::vector<LattesLevel> levels;
    bool all_ok = false;
};

namespace lattesdetail {

// smallest square root of -1/4 in F_p (rank order)
inline std::uint64_t small_k(std::uint64_t p) {
    std::uint64_t inv4 = detail::powmod_u64(4, p - 2, p);
    std::uint64_t target = (p - inv4) % p;
    for (std::uint64_t k = 0; k < p; ++k)
        if (detail::mulmod_u64(k, k, p) == target) return k;
    raise(errc::wrong_residue_class, "-1/4 is not a square; need p = 1 mod 4");
}

} // namespace lattesdetail

inline LattesLevel lattes_level_audit(std::uint64_t p, int n, std::uint64_t k_rank,
                                      const GaussianInt& pi) {
    FieldCtx ctx = FieldCtx::build(p, std::uint32_t(n));
    ctx.check_enumerable();
    std::uint64_t q = ctx.order();
    std::uint64_t N = q + 1;

    LattesLevel lvl;
    lvl.n = n;
    lvl.total = N;
    lvl.v_minus = wp_valuation(pi.pow(n) - GaussianInt{1, 0});
    lvl.v_plus = wp_valuation(pi.pow(n) + GaussianInt{1, 0});

    // psi = k(x^2+1)/x as an exact-integer map
    RationalMapZ psi;
    psi.num = {{std::int64_t(k_rank)}, {}, {std::int64_t(k_rank)}};
    psi.den = {{}, {1}};
    psi.source = "k(x+1/x)";
    FieldMap f = FieldMap::reduce(psi, ctx);
    auto succ = successor_table(f);

    // squares bitmap over F_{p^n}
    std::vector<char> sq(q, 0);
    for (std::uint64_t r = 0; r < q; ++r) {
        FieldElem y = ctx.from_rank(r);
        sq[(y * y).rank()] = 1;
    }
    // sqrt(2) membership via the Euler criterion, cross-checked on the bitmap
    lvl.sqrt2_in_field = ctx.from_int(2).pow((q - 1) / 2).is_one();
    if (lvl.sqrt2_in_field != bool(sq[ctx.from_int(2).rank()]))
        raise(errc::not_a_square, "Euler criterion disagrees with the squares table");

    // S = roots of x^3 + x = {0, i, -i}; they lie in F_p since p = 1 mod 4
    std::vector<char> in_s(N, 0);
    for (std::uint64_t r = 0; r < q; ++r) {
        FieldElem x = ctx.from_rank(r);
        if ((x * x * x + x).is_zero()) in_s[r] = 1;
    }

    // side labels: side[r] = 1 for A, 0 for B
    std::vector<char> side(N, 0);
    for (std::uint64_t r = 0; r < q; ++r) {
        FieldElem x = ctx.from_rank(r);
        bool on_curve = sq[(x * x * x + x).rank()] || (x * x * x + x).is_zero();
        if (lvl.sqrt2_in_field)
            side[r] = on_curve ? 1 : 0;
        else
            side[r] = (on_curve && !in_s[r]) ? 1 : 0;
    }
    side[q] = lvl.sqrt2_in_field ? 1 : 0; // infinity joins A iff sqrt 2 is rational

    for (std::uint64_t r = 0; r < N; ++r)
        (side[r] ? lvl.size_a : lvl.size_b)++;

    // psi-invariance of both sides
    lvl.invariance_ok = true;
    for (std::uint64_t r = 0; r < N; ++r)
        if (side[succ[r]] != side[r]) lvl.invariance_ok = false;

    // periodic points via the functional graph
    auto per = periodic_mask_graph(succ);
    for (std::uint64_t r = 0; r < N; ++r)
        if (per[r]) (side[r] ? lvl.periodic_a : lvl.periodic_b)++;
    std::uint64_t per_total = lvl.periodic_a + lvl.periodic_b;
    lvl.proportion = Rat64(std::int64_t(per_total), std::int64_t(N));
    lvl.proportion_ok = lvl.proportion >= Rat64(1, 8);

    std::uint64_t small_per = lvl.v_minus <= lvl.v_plus ? lvl.periodic_a : lvl.periodic_b;
    std::uint64_t small_size = lvl.v_minus <= lvl.v_plus ? lvl.size_a : lvl.size_b;
    lvl.side_proportion_ok =
        small_size == 0 || Rat64(std::int64_t(small_per), std::int64_t(small_size)) >= Rat64(1, 4);

    // tree-depth audit: every periodic point roots a complete binary tree of
    // hanging preimages with the side's predicted depth; the tree at infinity
    // carries the two critical points +-1 at depth three, where the doubled
    // local index halves the width from then on
    {
        std::vector<std::vector<std::uint32_t>> pre(N);
        for (std::uint64_t r = 0; r < N; ++r)
            if (!per[r] || !per[succ[r]]) pre[succ[r]].push_back(std::uint32_t(r));
        // (edges out of periodic points into their cycle are not tree edges)
        lvl.tree_audit_ok = true;
        for (std::uint64_t z = 0; z < N && lvl.tree_audit_ok; ++z) {
            if (!per[z]) continue;
            int predicted = side[z] ? lvl.v_minus : lvl.v_plus;
            std::vector<std::uint64_t> frontier;
            for (std::uint32_t w : pre[z])
                if (!per[w]) frontier.push_back(w);
            std::vector<std::uint64_t> widths;
            while (!frontier.empty()) {
                widths.push_back(frontier.size());
                std::vector<std::uint64_t> next;
                for (std::uint64_t w : frontier)
                    for (std::uint32_t u : pre[w]) next.push_back(u);
                frontier = std::move(next);
            }
            bool is_infinity_tree = (z == q);
            std::vector<std::uint64_t> expect;
            if (!is_infinity_tree) {
                for (int j = 1; j <= predicted; ++j)
                    expect.push_back(std::uint64_t(1) << (j - 1));
            } else {
                for (int j = 1; j <= predicted; ++j) {
                    if (j <= 2)
                        expect.push_back(std::uint64_t(1) << (j - 1));
                    else
                        expect.push_back(std::uint64_t(1) << (j - 2));
                }
            }
            if (widths != expect) {
                lvl.tree_audit_ok = false;
                lvl.tree_audit_note = "periodic rank " + std::to_string(z) + ": got depths ";
                for (auto w : widths) lvl.tree_audit_note += std::to_string(w) + " ";
                lvl.tree_audit_note += "expected ";
                for (auto w : expect) lvl.tree_audit_note += std::to_string(w) + " ";
            }
        }
    }

    // Hasse proximity of the A-side density to 1/2
    {
        double lhs = std::abs(double(lvl.size_a) / double(N) - 0.5);
        double rhs = 2.0 * std::pow(double(p), -double(n) / 2.0) + 2.0 / double(N);
        lvl.hasse_ok = lhs <= rhs;
    }
    return lvl;
}

inline LattesReport lattes_audit(std::uint64_t p, int n_max,
                                 std::uint64_t enum_budget = 1'000'000) {
    if (p % 4 != 1) raise(errc::wrong_residue_class, "p must be 1 mod 4");
    LattesReport rep;
    rep.p = p;
    rep.curve_points = count_curve_points(p);
    rep.trace = std::int64_t(p) + 1 - std::int64_t(rep.curve_points);
    rep.pi = frobenius_pi(p, rep.trace);
    rep.k_rank = lattesdetail::small_k(p);
    rep.all_ok = true;
    std::uint64_t pw = 1;
    for (int n = 1; n <= n_max; ++n) {
        if (pw > enum_budget / p) break;
        pw *= p;
        if (pw > enum_budget) break;
        LattesLevel lvl = lattes_level_audit(p, n, rep.k_rank, rep.pi);
        rep.all_ok = rep.all_ok && lvl.invariance_ok && lvl.tree_audit_ok && lvl.proportion_ok &&
                     lvl.hasse_ok && std::min(lvl.v_minus, lvl.v_plus) <= 2;
        rep.levels.push_back(std::move(lvl));
    }
    return rep;
}

} // namespace fixprop
