#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "automaton.hpp"
#include "field.hpp" // budgets

namespace fixprop {

using BigInt = boost::multiprecision::cpp_int;
using Perm = std::vector<std::uint32_t>;

inline Perm perm_identity(std::size_t D) {
    Perm p(D);
    for (std::size_t i = 0; i < D; ++i) p[i] = std::uint32_t(i);
    return p;
}
inline void perm_compose(Perm& out, const Perm& f, const Perm& g) {
    // (f*g)(x) = f(g(x))
    out.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[g[i]];
}
inline Perm perm_inverse(const Perm& p) {
    Perm q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = std::uint32_t(i);
    return q;
}
inline long perm_first_moved(const Perm& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return long(i);
    return -1;
}

// Vertices of the levels 1..n of the d-ary tree, level-major: level k
// occupies [offset(k), offset(k+1)), words ranked lexicographically with the
// first letter most significant.  Every tree automorphism preserves levels,
// so permutations of this domain decompose into per-level segments.
struct TreeDomain {
    int d = 0, n = 0;
    std::vector<std::uint64_t> offset; // offset[k] for k = 1..n+1
    std::uint64_t size = 0;

    TreeDomain() = default;
    TreeDomain(int alphabet, int levels) : d(alphabet), n(levels) {
        offset.assign(size_t(n) + 2, 0);
        std::uint64_t width = 1;
        for (int k = 1; k <= n; ++k) {
            width *= std::uint64_t(d);
            offset[size_t(k) + 1] = offset[size_t(k)] + width;
        }
        size = offset[size_t(n) + 1];
    }

    std::uint64_t level_begin(int k) const { return offset[size_t(k)]; }
    std::uint64_t level_size(int k) const { return offset[size_t(k) + 1] - offset[size_t(k)]; }

    std::uint64_t encode(const Automaton::Letters& w) const {
        std::uint64_t r = 0;
        for (int x : w) r = r * std::uint64_t(d) + std::uint64_t(x);
        return offset[w.size()] + r;
    }
    Automaton::Letters decode(int level, std::uint64_t index) const {
        std::uint64_t r = index - offset[size_t(level)];
        Automaton::Letters w(size_t(level), 0);
        for (int i = level; i-- > 0;) {
            w[size_t(i)] = int(r % std::uint64_t(d));
            r /= std::uint64_t(d);
        }
        return w;
    }
};

// Deterministic Schreier-Sims over the natural point order.  Because parents
// precede children in the domain, every basic orbit stays inside one sibling
// block (at most d points), which keeps transversals flat.  The fixed base
// order also makes the pointwise stabilizer of the levels above k a plain
// suffix of the chain.
class PermGroup {
public:
    PermGroup(std::size_t D, std::vector<Perm> generators) : D_(D) {
        for (auto& g : generators) add_generator(std::move(g));
        verify();
    }

    std::size_t degree() const { return D_; }

    BigInt order() const { return suffix_order_impl(0); }

    // Order of the pointwise stabilizer of all points < from.
    BigInt suffix_order(std::uint64_t from) const { return suffix_order_impl(from); }

    std::uint64_t order_u64_capped(std::uint64_t cap, std::uint64_t from = 0) const {
        std::uint64_t o = 1;
        for (const auto& L : levels_) {
            if (L.beta < from) continue;
            o *= L.orbit.size();
            if (o > cap) return cap + 1;
        }
        return o;
    }

    // Strong generators fixing every point < from (they generate the suffix
    // stabilizer).
    std::vector<const Perm*> suffix_generators(std::uint64_t from) const {
        std::vector<const Perm*> out;
        for (std::size_t i = 0; i < gen_ids_.size(); ++i)
            if (first_moved_[i] >= long(from)) out.push_back(&store_[size_t(gen_ids_[i])]);
        return out;
    }

    // Exactly uniform element: one uniform transversal representative per
    // chain level, composed.
    template <typename Rng>
    Perm sample(Rng& rng) const {
        Perm acc = perm_identity(D_), tmp;
        for (const auto& L : levels_) {
            std::size_t pick = bounded(rng, L.orbit.size());
            if (L.rep[pick] < 0) continue; // identity representative
            perm_compose(tmp, acc, store_[size_t(L.rep[pick])]);
            acc.swap(tmp);
        }
        return acc;
    }

    // Depth-first product of transversals: visits every element exactly once.
    template <typename Fn>
    void enumerate(Fn&& visit, std::uint64_t from = 0) const {
        std::vector<const Level*> lv;
        for (const auto& L : levels_)
            if (L.beta >= from) lv.push_back(&L);
        Perm acc = perm_identity(D_);
        enumerate_rec(lv, 0, acc, visit);
    }

    const std::vector<std::uint64_t> base_points() const {
        std::vector<std::uint64_t> out;
        for (const auto& L : levels_) out.push_back(L.beta);
        return out;
    }

private:
    struct Level {
        std::uint64_t beta = 0;
        std::vector<std::uint32_t> orbit; // orbit[0] = beta
        std::vector<int> rep;             // store id of u with u(beta) = orbit[j]; -1 = id
    };

    template <typename Rng>
    static std::size_t bounded(Rng& rng, std::size_t n) {
        // unbiased rejection sampling; stable across platforms
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = rng();
        } while (v >= limit);
        return std::size_t(v % n);
    }

    template <typename Fn>
    void enumerate_rec(const std::vector<const Level*>& lv, std::size_t depth, const Perm& acc,
                       Fn&& visit) const {
        if (depth == lv.size()) {
            visit(acc);
            return;
        }
        const Level& L = *lv[depth];
        Perm next;
        for (std::size_t j = 0; j < L.orbit.size(); ++j) {
            if (L.rep[j] < 0) {
                enumerate_rec(lv, depth + 1, acc, visit);
            } else {
                perm_compose(next, acc, store_[size_t(L.rep[j])]);
                enumerate_rec(lv, depth + 1, next, visit);
            }
        }
    }

    BigInt suffix_order_impl(std::uint64_t from) const {
        BigInt o = 1;
        for (const auto& L : levels_)
            if (L.beta >= from) o *= std::uint64_t(L.orbit.size());
        return o;
    }

    int store_perm(Perm p) {
        store_.push_back(std::move(p));
        store_inv_.push_back(perm_inverse(store_.back()));
        return int(store_.size()) - 1;
    }

    std::size_t level_index(std::uint64_t beta) {
        std::size_t i = 0;
        while (i < levels_.size() && levels_[i].beta < beta) ++i;
        if (i == levels_.size() || levels_[i].beta != beta) {
            Level L;
            L.beta = beta;
            L.orbit = {std::uint32_t(beta)};
            L.rep = {-1};
            levels_.insert(levels_.begin() + long(i), std::move(L));
        }
        return i;
    }

    void add_generator(Perm g) {
        long fm = perm_first_moved(g);
        if (fm < 0) return;
        int id = store_perm(std::move(g));
        gen_ids_.push_back(id);
        first_moved_.push_back(fm);
        level_index(std::uint64_t(fm));
    }

    void rebuild_orbit(Level& L) {
        std::vector<int> gen_ids;
        for (std::size_t i = 0; i < gen_ids_.size(); ++i)
            if (first_moved_[i] >= long(L.beta)) gen_ids.push_back(gen_ids_[i]);
        L.orbit = {std::uint32_t(L.beta)};
        L.rep = {-1};
        Perm tmp;
        for (std::size_t j = 0; j < L.orbit.size(); ++j) {
            for (int gid : gen_ids) {
                std::uint32_t img = store_[size_t(gid)][L.orbit[j]];
                bool known = false;
                for (std::uint32_t pt : L.orbit)
                    if (pt == img) { known = true; break; }
                if (known) continue;
                int rep_id;
                if (L.rep[j] < 0) {
                    rep_id = gid;
                } else {
                    perm_compose(tmp, store_[size_t(gid)], store_[size_t(L.rep[j])]);
                    rep_id = store_perm(tmp); // may reallocate store_
                }
                L.orbit.push_back(img);
                L.rep.push_back(rep_id);
            }
        }
    }

    // Strips through chain levels with beta >= from; returns the residue.
    Perm strip(Perm r, std::uint64_t from) const {
        Perm tmp;
        for (const auto& L : levels_) {
            if (L.beta < from) continue;
            std::uint32_t img = r[L.beta];
            if (img == L.beta) continue;
            bool hit = false;
            for (std::size_t j = 0; j < L.orbit.size(); ++j) {
                if (L.orbit[j] == img) {
                    if (L.rep[j] >= 0) {
                        perm_compose(tmp, store_inv_[size_t(L.rep[j])], r);
                        r.swap(tmp);
                    }
                    hit = true;
                    break;
                }
            }
            if (!hit) return r; // sticks here; caller inspects first moved point
        }
        return r;
    }

    void verify() {
        // Schreier generators at every level must strip to the identity;
        // every failure adds a strong generator and restarts below.
        long i = long(levels_.size()) - 1;
        Perm sch, tmp;
        while (i >= 0) {
            rebuild_orbit(levels_[size_t(i)]);
            bool restart = false;
            std::size_t orbit_size = levels_[size_t(i)].orbit.size();
            std::uint64_t beta = levels_[size_t(i)].beta;
            for (std::size_t j = 0; !restart && j < orbit_size; ++j) {
                for (std::size_t gi = 0; !restart && gi < gen_ids_.size(); ++gi) {
                    if (first_moved_[gi] < long(beta)) continue;
                    const Level& L = levels_[size_t(i)];
                    const Perm& g = store_[size_t(gen_ids_[gi])];
                    // u_{g(pt)}^{-1} * g * u_pt
                    if (L.rep[j] < 0)
                        sch = g;
                    else
                        perm_compose(sch, g, store_[size_t(L.rep[j])]);
                    std::uint32_t img = sch[beta];
                    long k = -1;
                    for (std::size_t t = 0; t < L.orbit.size(); ++t)
                        if (L.orbit[t] == img) { k = long(t); break; }
                    if (k < 0) { // orbit stale (a generator arrived mid-pass)
                        restart = true;
                        break;
                    }
                    if (L.rep[size_t(k)] >= 0) {
                        perm_compose(tmp, store_inv_[size_t(L.rep[size_t(k)])], sch);
                        sch.swap(tmp);
                    }
                    Perm residue = strip(std::move(sch), beta + 1);
                    long fm = perm_first_moved(residue);
                    if (fm >= 0) {
                        std::size_t at = level_index(std::uint64_t(fm));
                        int id = store_perm(std::move(residue));
                        gen_ids_.push_back(id);
                        first_moved_.push_back(fm);
                        i = long(at);
                        restart = true;
                    }
                }
            }
            if (!restart) --i;
        }
    }

    std::size_t D_;
    std::vector<Perm> store_, store_inv_;
    std::vector<int> gen_ids_;
    std::vector<long> first_moved_;
    std::vector<Level> levels_;
};

// The finite quotient G_n <= Aut(X^n) of the automaton group, realized on the
// level-major tree domain with exact order data.
class LevelQuotient {
public:
    static LevelQuotient build(const Automaton& aut, int n) {
        std::uint64_t width = 1;
        for (int k = 0; k < n; ++k) {
            width *= std::uint64_t(aut.alphabet());
            if (width > budgets::degree())
                raise(errc::degree_budget_exceeded,
                      "level " + std::to_string(n) + " exceeds the permutation-degree budget");
        }
        LevelQuotient q;
        q.aut_ = &aut;
        q.n_ = n;
        q.dom_ = TreeDomain(aut.alphabet(), n);
        for (int g : aut.generators()) {
            q.gen_perms_.push_back(q.state_perm(g));
            q.gen_inv_perms_.push_back(perm_inverse(q.gen_perms_.back()));
        }
        q.group_ = std::make_shared<PermGroup>(q.dom_.size, q.gen_perms_);
        return q;
    }

    const Automaton& automaton() const { return *aut_; }
    int level() const { return n_; }
    const TreeDomain& domain() const { return dom_; }
    const PermGroup& group() const { return *group_; }
    const std::vector<Perm>& generator_perms() const { return gen_perms_; }

    BigInt order() const { return group_->order(); }

    // |H_k| for 1 <= k <= n: the kernel of G_k-data inside this chain is the
    // pointwise stabilizer of everything above level k.
    BigInt kernel_order(int k) const { return group_->suffix_order(dom_.level_begin(k)); }
    std::vector<const Perm*> kernel_generators(int k) const {
        return group_->suffix_generators(dom_.level_begin(k));
    }

    bool enumerable(std::uint64_t budget = budgets::enumeration()) const {
        return group_->order_u64_capped(budget) <= budget;
    }
    std::uint64_t order_u64(std::uint64_t cap = budgets::enumeration()) const {
        return group_->order_u64_capped(cap);
    }

    // Domain permutation of an automaton word [s1..sk] = s1 o ... o sk
    // (rightmost state acts first).
    Perm word_perm(const Automaton::Word& w) const {
        Perm p = perm_identity(dom_.size), tmp;
        for (size_t i = 0; i < w.size(); ++i) {
            Perm s = state_perm(w[i]);
            perm_compose(tmp, p, s);
            p.swap(tmp);
        }
        return p;
    }

    Perm state_perm(int s) const {
        Perm p(dom_.size);
        for (int k = 1; k <= n_; ++k) {
            std::uint64_t lo = dom_.level_begin(k), hi = lo + dom_.level_size(k);
            for (std::uint64_t idx = lo; idx < hi; ++idx) {
                auto w = dom_.decode(k, idx);
                p[idx] = std::uint32_t(dom_.encode(aut_->act_state(s, w)));
            }
        }
        return p;
    }

    // fixed points of a domain permutation at tree level k
    std::uint64_t fixed_at_level(const Perm& p, int k) const {
        std::uint64_t lo = dom_.level_begin(k), hi = lo + dom_.level_size(k);
        std::uint64_t c = 0;
        for (std::uint64_t i = lo; i < hi; ++i) c += (p[i] == i);
        return c;
    }

    // orbit of the whole level under the generator action
    bool transitive_on_level(int k) const {
        std::uint64_t lo = dom_.level_begin(k), sz = dom_.level_size(k);
        std::vector<char> seen(dom_.size, 0);
        std::vector<std::uint64_t> stack{lo};
        seen[lo] = 1;
        std::uint64_t cnt = 1;
        while (!stack.empty()) {
            std::uint64_t v = stack.back();
            stack.pop_back();
            for (size_t gi = 0; gi < gen_perms_.size(); ++gi) {
                for (std::uint64_t img :
                     {std::uint64_t(gen_perms_[gi][v]), std::uint64_t(gen_inv_perms_[gi][v])}) {
                    if (!seen[img]) {
                        seen[img] = 1;
                        ++cnt;
                        stack.push_back(img);
                    }
                }
            }
        }
        return cnt == sz;
    }

    // doubly transitive on X (meaningful for d >= 3; for d = 2 it degenerates
    // to plain transitivity on the single pair orbit)
    bool doubly_transitive_on_letters() const {
        int d = dom_.d;
        if (d == 2) return transitive_on_level(1);
        std::vector<std::vector<char>> seen(size_t(d), std::vector<char>(size_t(d), 0));
        std::vector<std::pair<int, int>> stack{{0, 1}};
        seen[0][1] = 1;
        std::uint64_t cnt = 1;
        std::uint64_t lo = dom_.level_begin(1);
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            for (size_t gi = 0; gi < gen_perms_.size(); ++gi) {
                for (const Perm* g : {&gen_perms_[gi], &gen_inv_perms_[gi]}) {
                    int ia = int((*g)[lo + std::uint64_t(a)] - lo);
                    int ib = int((*g)[lo + std::uint64_t(b)] - lo);
                    if (!seen[size_t(ia)][size_t(ib)]) {
                        seen[size_t(ia)][size_t(ib)] = 1;
                        ++cnt;
                        stack.push_back({ia, ib});
                    }
                }
            }
        }
        return cnt == std::uint64_t(d) * std::uint64_t(d - 1);
    }

private:
    const Automaton* aut_ = nullptr;
    int n_ = 0;
    TreeDomain dom_;
    std::vector<Perm> gen_perms_, gen_inv_perms_;
    std::shared_ptr<PermGroup> group_;
};

} // namespace fixprop
