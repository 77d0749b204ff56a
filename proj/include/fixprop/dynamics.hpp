#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "expr.hpp"
#include "field.hpp"
#include "fpoly.hpp"
#include "rational.hpp"

namespace fixprop {

// A point of P^1(F_q): affine x, or the point at infinity.  In bulk
// computations points are addressed by rank instead: finite points get ranks
// 0..q-1 in field enumeration order, infinity gets rank q.
struct ProjPoint {
    bool infinite = false;
    FieldElem x;

    static ProjPoint at_infinity() { return ProjPoint{true, FieldElem()}; }
    static ProjPoint finite(FieldElem v) { return ProjPoint{false, std::move(v)}; }

    friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
        if (a.infinite || b.infinite) return a.infinite == b.infinite;
        return a.x == b.x;
    }
};

inline std::uint64_t point_rank(const FieldCtx& ctx, const ProjPoint& pt) {
    return pt.infinite ? ctx.order() : pt.x.rank();
}
inline ProjPoint point_from_rank(const FieldCtx& ctx, std::uint64_t r) {
    if (r == ctx.order()) return ProjPoint::at_infinity();
    return ProjPoint::finite(ctx.from_rank(r));
}

// A degree-d self-map of P^1 over a fixed field, held as the normalized
// homogeneous pair (F, G) with Res(F, G) != 0.  FieldMap never owns its
// FieldCtx.
class FieldMap {
public:
    // Reduction of an exact-integer map.  The homogenization degree is the
    // degree over the integers, so a leading coefficient vanishing mod p (or
    // a common factor appearing mod p) shows up as Res = 0.
    static FieldMap reduce(const RationalMapZ& m, const FieldCtx& ctx) {
        int d = m.degree();
        if (d < 0) raise(errc::parse_error, "empty map");
        FPoly num = reduce_poly(ctx, m.num);
        FPoly den = reduce_poly(ctx, m.den);
        num.resize(size_t(d) + 1, ctx.zero());
        den.resize(size_t(d) + 1, ctx.zero());
        FieldMap f;
        f.ctx_ = &ctx;
        f.d_ = d;
        f.F_ = std::move(num);
        f.G_ = std::move(den);
        if (fp_resultant_forms(ctx, f.F_, f.G_).is_zero())
            raise(errc::bad_reduction, "map '" + m.source + "' has bad reduction over " + ctx.describe());
        f.normalize();
        return f;
    }

    // Build from affine numerator/denominator over the field; common factors
    // are removed first, then the pair must be a morphism.
    static FieldMap from_polys(const FieldCtx& ctx, FPoly num, FPoly den) {
        fp_trim(num);
        fp_trim(den);
        if (num.empty() && den.empty()) raise(errc::bad_reduction, "zero map");
        FPoly g = fp_gcd(ctx, num, den);
        if (fp_deg(g) > 0) {
            num = fp_divmod(ctx, std::move(num), g).first;
            den = fp_divmod(ctx, std::move(den), g).first;
        }
        int d = std::max(fp_deg(num), fp_deg(den));
        if (d < 0) raise(errc::bad_reduction, "zero map");
        num.resize(size_t(d) + 1, ctx.zero());
        den.resize(size_t(d) + 1, ctx.zero());
        FieldMap f;
        f.ctx_ = &ctx;
        f.d_ = d;
        f.F_ = std::move(num);
        f.G_ = std::move(den);
        if (fp_resultant_forms(ctx, f.F_, f.G_).is_zero())
            raise(errc::bad_reduction, "pair is not a morphism of P^1");
        f.normalize();
        return f;
    }

    const FieldCtx& ctx() const { return *ctx_; }
    int degree() const { return d_; }
    const FPoly& F() const { return F_; }
    const FPoly& G() const { return G_; }

    // Value as an unnormalized homogeneous pair (u : v); never (0, 0).
    std::pair<FieldElem, FieldElem> eval_pair(const ProjPoint& pt) const {
        if (pt.infinite) return {F_.back(), G_.back()};
        FieldElem u = ctx_->zero(), v = ctx_->zero();
        for (size_t i = F_.size(); i-- > 0;) {
            u = u * pt.x + F_[i];
            v = v * pt.x + G_[i];
        }
        return {u, v};
    }

    ProjPoint eval(const ProjPoint& pt) const {
        auto [u, v] = eval_pair(pt);
        if (v.is_zero()) return ProjPoint::at_infinity();
        return ProjPoint::finite(u * v.inverse());
    }

    bool operator==(const FieldMap& o) const { return F_ == o.F_ && G_ == o.G_; }

private:
    void normalize() {
        size_t lead = F_.size();
        while (lead-- > 0)
            if (!F_[lead].is_zero()) break;
        FieldElem inv = F_[lead].inverse();
        for (auto& c : F_) c = c * inv;
        for (auto& c : G_) c = c * inv;
    }

    const FieldCtx* ctx_ = nullptr;
    int d_ = 0;
    FPoly F_, G_; // homogeneous coefficients, F[i] X^i Y^(d-i)
};

// One successor index per point (flat array over point ranks); linear memory
// so fields up to the enumeration budget stay tractable.
inline std::vector<std::uint32_t> successor_table(const FieldMap& map) {
    const FieldCtx& ctx = map.ctx();
    ctx.check_enumerable();
    std::uint64_t q = ctx.order();
    std::uint64_t N = q + 1;
    std::vector<std::uint32_t> succ(N);
    // batched inversion over chunks keeps memory flat and avoids a field
    // inversion per point
    const std::uint64_t chunk = 1 << 16;
    std::vector<FieldElem> us, vs;
    std::vector<char> ok;
    for (std::uint64_t base = 0; base < q; base += chunk) {
        std::uint64_t hi = std::min(q, base + chunk);
        us.clear();
        vs.clear();
        for (std::uint64_t r = base; r < hi; ++r) {
            auto [u, v] = map.eval_pair(ProjPoint::finite(ctx.from_rank(r)));
            us.push_back(std::move(u));
            vs.push_back(std::move(v));
        }
        batch_invert(ctx, vs, ok);
        for (std::uint64_t r = base; r < hi; ++r) {
            size_t i = size_t(r - base);
            succ[r] = ok[i] ? std::uint32_t((us[i] * vs[i]).rank()) : std::uint32_t(q);
        }
    }
    auto [u, v] = map.eval_pair(ProjPoint::at_infinity());
    succ[q] = v.is_zero() ? std::uint32_t(q) : std::uint32_t((u * v.inverse()).rank());
    return succ;
}

// Per(f, U) as the stable forward image: apply the map to the full point set
// until the image stops shrinking.
inline std::vector<char> periodic_mask_iterate(const std::vector<std::uint32_t>& succ) {
    size_t N = succ.size();
    std::vector<char> cur(N, 1), next(N);
    std::uint64_t size = N;
    for (;;) {
        std::fill(next.begin(), next.end(), 0);
        std::uint64_t cnt = 0;
        for (size_t i = 0; i < N; ++i)
            if (cur[i] && !next[succ[i]]) {
                next[succ[i]] = 1;
                ++cnt;
            }
        if (cnt == size) return cur;
        cur.swap(next);
        size = cnt;
    }
}

// Independent route: peel the functional graph by in-degree; what survives
// lies on cycles.
inline std::vector<char> periodic_mask_graph(const std::vector<std::uint32_t>& succ) {
    size_t N = succ.size();
    std::vector<std::uint32_t> indeg(N, 0);
    for (size_t i = 0; i < N; ++i) ++indeg[succ[i]];
    std::vector<std::uint32_t> stack;
    for (size_t i = 0; i < N; ++i)
        if (indeg[i] == 0) stack.push_back(std::uint32_t(i));
    std::vector<char> alive(N, 1);
    while (!stack.empty()) {
        std::uint32_t v = stack.back();
        stack.pop_back();
        alive[v] = 0;
        std::uint32_t w = succ[v];
        if (--indeg[w] == 0) stack.push_back(w);
    }
    return alive;
}

inline std::uint64_t count_mask(const std::vector<char>& m) {
    std::uint64_t c = 0;
    for (char v : m) c += std::uint64_t(v);
    return c;
}

inline std::vector<ProjPoint> points_from_mask(const FieldCtx& ctx, const std::vector<char>& m) {
    std::vector<ProjPoint> out;
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i]) out.push_back(point_from_rank(ctx, i));
    return out;
}

inline std::vector<ProjPoint> periodic_points_iterate(const FieldMap& map) {
    return points_from_mask(map.ctx(), periodic_mask_iterate(successor_table(map)));
}
inline std::vector<ProjPoint> periodic_points_graph(const FieldMap& map) {
    return points_from_mask(map.ctx(), periodic_mask_graph(successor_table(map)));
}

// Cardinality of the m-th forward image of P^1(F_q).
inline std::uint64_t image_size(const FieldMap& map, int m) {
    auto succ = successor_table(map);
    size_t N = succ.size();
    std::vector<char> cur(N, 1), next(N);
    for (int step = 0; step < m; ++step) {
        std::fill(next.begin(), next.end(), 0);
        for (size_t i = 0; i < N; ++i)
            if (cur[i]) next[succ[i]] = 1;
        cur.swap(next);
    }
    return count_mask(cur);
}

struct ProportionRow {
    int n = 0;                  // extension step (field is F_{q^n})
    std::uint64_t periodic = 0;
    std::uint64_t total = 0;
    Rat64 proportion;
};

struct ProportionTable {
    std::uint64_t p = 0;
    std::uint32_t base_degree = 1;
    std::vector<ProportionRow> rows;
};

namespace dyndetail {

template <typename Fn>
inline void parallel_rows(int count, int jobs, Fn&& body) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    int workers = std::min(jobs, count);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

} // namespace dyndetail

// Proportion of periodic points of the reduction of `m` over F_{p^(base*k)}
// for k = 1..k_max.
inline ProportionTable vertical_scan(const RationalMapZ& m, std::uint64_t p, std::uint32_t base_degree,
                                     int k_max, int jobs = 1) {
    ProportionTable table;
    table.p = p;
    table.base_degree = base_degree;
    table.rows.resize(size_t(k_max));
    dyndetail::parallel_rows(k_max, jobs, [&](int i) {
        int k = i + 1;
        FieldCtx ctx = FieldCtx::build(p, base_degree * std::uint32_t(k));
        ctx.check_enumerable();
        FieldMap f = FieldMap::reduce(m, ctx);
        auto succ = successor_table(f);
        std::uint64_t per = count_mask(periodic_mask_graph(succ));
        std::uint64_t total = ctx.order() + 1;
        table.rows[size_t(i)] =
            ProportionRow{k, per, total, Rat64(std::int64_t(per), std::int64_t(total))};
    });
    return table;
}

struct HorizontalRow {
    std::uint64_t p = 0;
    bool good = false;          // bad-reduction primes are reported, not fatal
    std::uint64_t periodic = 0;
    std::uint64_t total = 0;
    Rat64 proportion;
};

struct HorizontalScan {
    std::vector<HorizontalRow> rows;
    Rat64 running_min{1, 1};    // over good primes, an empirical liminf probe
};

inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> ps;
    for (std::uint64_t v = std::max<std::uint64_t>(lo, 2); v <= hi; ++v)
        if (detail::is_prime_u64(v)) ps.push_back(v);
    return ps;
}

inline HorizontalScan horizontal_scan(const RationalMapZ& m, std::uint64_t pmin, std::uint64_t pmax,
                                      int jobs = 1) {
    auto ps = primes_in(pmin, pmax);
    if (ps.empty()) raise(errc::empty_range, "no primes in range");
    HorizontalScan scan;
    scan.rows.resize(ps.size());
    dyndetail::parallel_rows(int(ps.size()), jobs, [&](int i) {
        std::uint64_t p = ps[size_t(i)];
        HorizontalRow row;
        row.p = p;
        try {
            FieldCtx ctx = FieldCtx::build(p, 1);
            FieldMap f = FieldMap::reduce(m, ctx);
            auto succ = successor_table(f);
            row.good = true;
            row.periodic = count_mask(periodic_mask_graph(succ));
            row.total = p + 1;
            row.proportion = Rat64(std::int64_t(row.periodic), std::int64_t(row.total));
        } catch (const error& e) {
            if (e.code() != errc::bad_reduction && e.code() != errc::parse_error) throw;
            row.good = false;
        }
        scan.rows[size_t(i)] = std::move(row);
    });
    for (const auto& r : scan.rows)
        if (r.good && r.proportion < scan.running_min) scan.running_min = r.proportion;
    return scan;
}

} // namespace fixprop
