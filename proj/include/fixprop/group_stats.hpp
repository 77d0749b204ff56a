#pragma once

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "level_quotient.hpp"
#include "rational.hpp"

namespace fixprop {

// Fixed-point proportion of one level quotient: the fraction of elements
// fixing at least one level-n vertex.  Exact by full enumeration when the
// order is within budget; otherwise estimated from exactly-uniform samples
// drawn through the stabilizer chain (the estimate is stochastic, the
// uniformity is not).
struct FppRow {
    int level = 0;
    bool exact = false;
    Rat64 value;            // exact case
    double estimate = 0.0;  // sampled case
    double sigma = 0.0;     // one standard error
    double hoeffding99 = 0.0;
    std::uint64_t samples = 0;
    BigInt order;
};

inline bool has_fixed_point_at(const Perm& p, const TreeDomain& dom, int level) {
    std::uint64_t lo = dom.level_begin(level), hi = lo + dom.level_size(level);
    for (std::uint64_t i = lo; i < hi; ++i)
        if (p[i] == i) return true;
    return false;
}

inline Rat64 fpp_exact(const LevelQuotient& q) {
    std::uint64_t order = q.order_u64();
    if (order > budgets::enumeration())
        raise(errc::budget_exceeded, "group too large for exact enumeration");
    std::uint64_t hits = 0;
    q.group().enumerate([&](const Perm& p) {
        if (has_fixed_point_at(p, q.domain(), q.level())) ++hits;
    });
    return Rat64(std::int64_t(hits), std::int64_t(order));
}

inline FppRow fpp_sampled(const LevelQuotient& q, std::uint64_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        Perm p = q.group().sample(rng);
        if (has_fixed_point_at(p, q.domain(), q.level())) ++hits;
    }
    FppRow row;
    row.level = q.level();
    row.exact = false;
    row.estimate = double(hits) / double(samples);
    row.sigma = std::sqrt(std::max(row.estimate * (1.0 - row.estimate), 1e-12) / double(samples));
    row.hoeffding99 = std::sqrt(std::log(2.0 / 0.01) / (2.0 * double(samples)));
    row.samples = samples;
    row.order = q.order();
    return row;
}

struct FppReport {
    std::vector<FppRow> rows;
    std::uint64_t seed = 0;
};

inline FppReport fpp_report(const Automaton& aut, int n_max, std::uint64_t samples,
                            std::uint64_t seed,
                            std::uint64_t enum_budget = budgets::enumeration()) {
    FppReport rep;
    rep.seed = seed;
    for (int n = 1; n <= n_max; ++n) {
        LevelQuotient q = LevelQuotient::build(aut, n);
        if (q.order_u64(enum_budget) <= enum_budget) {
            FppRow row;
            row.level = n;
            row.exact = true;
            row.value = fpp_exact(q);
            row.order = q.order();
            rep.rows.push_back(std::move(row));
        } else {
            rep.rows.push_back(fpp_sampled(q, samples, seed + std::uint64_t(n)));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Martingale criterion: the fixed-point process is a martingale iff for all
// n and every v in X^{n-1}, the kernel H_n is transitive on the sibling
// block v*.  Orbit sizes are reported (they are all equal, dividing d, for
// level-transitive groups).

struct MartingaleRow {
    int level = 0;
    bool passes = false;
    bool equal_orbits = false;
    int orbit_size = 0; // common size r when equal, else 0
};

inline MartingaleRow martingale_at(const LevelQuotient& q) {
    int n = q.level();
    const TreeDomain& dom = q.domain();
    auto kernel = q.kernel_generators(n);
    std::vector<Perm> gens;
    for (auto* g : kernel) {
        gens.push_back(*g);
        gens.push_back(perm_inverse(*g));
    }
    std::uint64_t lo = dom.level_begin(n), sz = dom.level_size(n);
    std::vector<char> seen(sz, 0);
    MartingaleRow row;
    row.level = n;
    row.passes = true;
    row.equal_orbits = true;
    row.orbit_size = -1;
    for (std::uint64_t start = 0; start < sz; ++start) {
        if (seen[start]) continue;
        std::vector<std::uint64_t> stack{lo + start};
        seen[start] = 1;
        int size = 1;
        while (!stack.empty()) {
            std::uint64_t v = stack.back();
            stack.pop_back();
            for (const Perm& g : gens) {
                std::uint64_t img = g[v];
                if (!seen[img - lo]) {
                    seen[img - lo] = 1;
                    ++size;
                    stack.push_back(img);
                }
            }
        }
        if (size != dom.d) row.passes = false;
        if (row.orbit_size < 0)
            row.orbit_size = size;
        else if (row.orbit_size != size)
            row.equal_orbits = false;
    }
    if (!row.equal_orbits) row.orbit_size = 0;
    return row;
}

inline std::vector<MartingaleRow> martingale_check(const Automaton& aut, int n_max) {
    std::vector<MartingaleRow> rows;
    for (int n = 1; n <= n_max; ++n)
        rows.push_back(martingale_at(LevelQuotient::build(aut, n)));
    return rows;
}

// ---------------------------------------------------------------------------
// Conditional-expectation audit on a fully enumerated quotient: group
// elements by the history (Y_1, ..., Y_{n-1}) of per-level fixed-point
// counts; the average of Y_n in each class must equal the last history entry
// exactly.

struct HistoryClass {
    std::vector<std::uint64_t> history; // Y_1 .. Y_{n-1}
    std::uint64_t count = 0;
    std::uint64_t sum_yn = 0;
    Rat64 expectation;
    bool matches = false;
};

inline std::vector<HistoryClass> conditional_expectation_audit(const LevelQuotient& q) {
    if (q.order_u64() > budgets::enumeration())
        raise(errc::not_enumerated, "quotient too large for the expectation audit");
    int n = q.level();
    std::map<std::vector<std::uint64_t>, std::pair<std::uint64_t, std::uint64_t>> classes;
    q.group().enumerate([&](const Perm& p) {
        std::vector<std::uint64_t> hist;
        for (int k = 1; k < n; ++k) hist.push_back(q.fixed_at_level(p, k));
        auto& slot = classes[hist];
        slot.first += 1;
        slot.second += q.fixed_at_level(p, n);
    });
    std::vector<HistoryClass> out;
    for (auto& [hist, sums] : classes) {
        HistoryClass hc;
        hc.history = hist;
        hc.count = sums.first;
        hc.sum_yn = sums.second;
        hc.expectation = Rat64(std::int64_t(sums.second), std::int64_t(sums.first));
        std::uint64_t prev = hist.empty() ? 1 : hist.back(); // Y_0 = 1 (the root)
        hc.matches = (hc.expectation == Rat64(std::int64_t(prev)));
        out.push_back(std::move(hc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Burnside audit on an enumerable kernel: average fixed-point count over H_n
// equals the number of H_n-orbits on X^n.

struct BurnsideAudit {
    std::uint64_t kernel_order = 0;
    std::uint64_t fix_sum = 0;
    std::uint64_t orbit_count = 0;
    bool matches = false;
};

inline BurnsideAudit burnside_audit(const LevelQuotient& q) {
    int n = q.level();
    const TreeDomain& dom = q.domain();
    std::uint64_t from = dom.level_begin(n);
    if (q.group().order_u64_capped(budgets::enumeration(), from) > budgets::enumeration())
        raise(errc::budget_exceeded, "kernel too large to enumerate");
    BurnsideAudit audit;
    q.group().enumerate(
        [&](const Perm& p) {
            audit.kernel_order += 1;
            audit.fix_sum += q.fixed_at_level(p, n);
        },
        from);
    // orbit count of H_n on X^n
    auto kernel = q.kernel_generators(n);
    std::vector<Perm> gens;
    for (auto* g : kernel) {
        gens.push_back(*g);
        gens.push_back(perm_inverse(*g));
    }
    std::uint64_t sz = dom.level_size(n);
    std::vector<char> seen(sz, 0);
    for (std::uint64_t s = 0; s < sz; ++s) {
        if (seen[s]) continue;
        ++audit.orbit_count;
        std::vector<std::uint64_t> stack{from + s};
        seen[s] = 1;
        while (!stack.empty()) {
            std::uint64_t v = stack.back();
            stack.pop_back();
            for (const Perm& g : gens)
                if (!seen[g[v] - from]) {
                    seen[g[v] - from] = 1;
                    stack.push_back(g[v]);
                }
        }
    }
    audit.matches = (audit.fix_sum == audit.kernel_order * audit.orbit_count);
    return audit;
}

// ---------------------------------------------------------------------------
// Recurrence surrogate at level n: the group must be transitive on X, and
// for each letter x the restrictions to x of the stabilizer of x must give
// all of G_{n-1} (orders compared through stabilizer chains).

inline bool recurrent_at(const Automaton& aut, int n) {
    LevelQuotient qn = LevelQuotient::build(aut, n);
    if (!qn.transitive_on_level(1)) return false;
    if (n == 1) return true; // G_0 is trivial; only transitivity bites
    LevelQuotient qprev = LevelQuotient::build(aut, n - 1);
    BigInt target = qprev.order();
    const TreeDomain& dom = qn.domain();
    const TreeDomain& dprev = qprev.domain();
    int d = dom.d;

    // transversal of the letter orbit, by BFS over generator action
    std::vector<Perm> gens;
    for (const Perm& g : qn.generator_perms()) {
        gens.push_back(g);
        gens.push_back(perm_inverse(g));
    }
    for (int x = 0; x < d; ++x) {
        std::uint64_t lo = dom.level_begin(1);
        std::vector<int> reached(static_cast<size_t>(d), -1); // -2 = identity transversal
        std::vector<Perm> trans(static_cast<size_t>(d), Perm{});
        reached[size_t(x)] = -2;
        std::vector<int> queue{x};
        std::vector<Perm> schreier;
        Perm tmp;
        while (!queue.empty()) {
            int y = queue.back();
            queue.pop_back();
            const Perm* ty = reached[size_t(y)] == -2 ? nullptr : &trans[size_t(y)];
            for (const Perm& g : gens) {
                int z = int(g[lo + std::uint64_t(y)] - lo);
                if (reached[size_t(z)] == -1) {
                    if (ty)
                        perm_compose(trans[size_t(z)], g, *ty);
                    else
                        trans[size_t(z)] = g;
                    reached[size_t(z)] = 0;
                    queue.push_back(z);
                } else {
                    // Schreier generator t_z^-1 g t_y, which fixes x
                    Perm w = ty ? (perm_compose(tmp, g, *ty), tmp) : g;
                    Perm s;
                    if (reached[size_t(z)] == -2)
                        s = w;
                    else
                        perm_compose(s, perm_inverse(trans[size_t(z)]), w);
                    schreier.push_back(std::move(s));
                }
            }
        }
        // restriction of each stabilizer generator at x, as a permutation of
        // the (n-1)-level domain
        std::vector<Perm> rg;
        for (const Perm& s : schreier) {
            Perm r(dprev.size);
            for (int k = 1; k <= n - 1; ++k) {
                std::uint64_t plo = dprev.level_begin(k);
                std::uint64_t psz = dprev.level_size(k);
                for (std::uint64_t i = 0; i < psz; ++i) {
                    auto w = dprev.decode(k, plo + i);
                    Automaton::Letters xw{x};
                    xw.insert(xw.end(), w.begin(), w.end());
                    std::uint64_t img = s[dom.encode(xw)];
                    auto iw = dom.decode(k + 1, img);
                    Automaton::Letters dropped(iw.begin() + 1, iw.end());
                    r[plo + i] = std::uint32_t(dprev.encode(dropped));
                }
            }
            if (perm_first_moved(r) >= 0) rg.push_back(std::move(r));
        }
        PermGroup restriction_group(dprev.size, std::move(rg));
        if (restriction_group.order() != target) return false;
    }
    return true;
}

inline std::vector<std::pair<int, bool>> recurrent_check(const Automaton& aut, int n_max) {
    std::vector<std::pair<int, bool>> out;
    for (int n = 1; n <= n_max; ++n) out.push_back({n, recurrent_at(aut, n)});
    return out;
}

} // namespace fixprop
