#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "automaton.hpp"

namespace fixprop {

// Nucleus closure.  Each round forms all pairwise products of the current
// states and adds the automorphisms that occur as restrictions of those
// products at arbitrarily long words (the attractor of the product's
// restriction graph), then re-minimizes; repeat until stable.  For a
// contracting group every attractor lies in the nucleus, so the closure
// stays finite and converges to a restriction-closed superset of it.
//
// Restrictions of a two-letter word are again words of length at most two,
// so the per-round graph lives on reduced pairs of states.
struct NucleusResult {
    Automaton automaton; // stable extended automaton; every state is a nucleus member
    bool complete = false;
    int rounds = 0;
};

namespace nucdetail {

// Graph of reduced pair-words (u, v) over the current states; (s, 0) encodes
// a single state, (0, 0) the identity.
struct PairGraph {
    const Automaton& cur;
    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> verts;
    std::vector<std::vector<int>> edges; // one target per letter

    explicit PairGraph(const Automaton& a) : cur(a) {}

    std::pair<int, int> reduce(int u, int v) const {
        if (u == 0) return {v, 0};
        if (v == 0) return {u, 0};
        if (cur.inverse_state(v) == u) return {0, 0};
        return {u, v};
    }

    int ensure(std::pair<int, int> key) {
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = int(verts.size());
        index[key] = id;
        verts.push_back(key);
        edges.emplace_back();
        auto [u, v] = key;
        int d = cur.alphabet();
        for (int x = 0; x < d; ++x) {
            std::pair<int, int> t;
            if (v == 0) { // single state (or identity)
                t = {cur.state(u).rest[size_t(x)], 0};
            } else {
                const auto& su = cur.state(u);
                const auto& sv = cur.state(v);
                t = reduce(su.rest[size_t(sv.perm[size_t(x)])], sv.rest[size_t(x)]);
            }
            int target = ensure(t); // may reallocate edges
            edges[size_t(id)].push_back(target);
        }
        return id;
    }

    // vertices lying on or reachable from a directed cycle
    std::vector<char> attractor() const {
        size_t n = verts.size();
        std::vector<int> comp = strongly_connected(n, edges);
        int ncomp = n ? 1 + *std::max_element(comp.begin(), comp.end()) : 0;
        std::vector<int> comp_size(size_t(ncomp), 0);
        std::vector<char> comp_cyclic(size_t(ncomp), 0);
        for (size_t v = 0; v < n; ++v) {
            ++comp_size[size_t(comp[v])];
            for (int t : edges[v])
                if (size_t(t) == v) comp_cyclic[size_t(comp[v])] = 1;
        }
        for (size_t v = 0; v < n; ++v)
            if (comp_size[size_t(comp[v])] >= 2) comp_cyclic[size_t(comp[v])] = 1;
        std::vector<char> out(n, 0);
        std::vector<int> stack;
        for (size_t v = 0; v < n; ++v)
            if (comp_cyclic[size_t(comp[v])] && !out[v]) {
                out[v] = 1;
                stack.push_back(int(v));
            }
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int t : edges[size_t(v)])
                if (!out[size_t(t)]) {
                    out[size_t(t)] = 1;
                    stack.push_back(t);
                }
        }
        return out;
    }

    // iterative Tarjan; returns a component id per vertex
    static std::vector<int> strongly_connected(size_t n, const std::vector<std::vector<int>>& edges) {
        std::vector<int> comp(n, -1), low(n, 0), num(n, -1), st;
        std::vector<char> onstack(n, 0);
        int counter = 0, ncomp = 0;
        struct Frame { int v; size_t e; };
        for (size_t root = 0; root < n; ++root) {
            if (num[root] >= 0) continue;
            std::vector<Frame> frames{{int(root), 0}};
            num[root] = low[root] = counter++;
            st.push_back(int(root));
            onstack[root] = 1;
            while (!frames.empty()) {
                auto& fr = frames.back();
                bool descended = false;
                while (fr.e < edges[size_t(fr.v)].size()) {
                    int t = edges[size_t(fr.v)][fr.e++];
                    if (num[size_t(t)] < 0) {
                        num[size_t(t)] = low[size_t(t)] = counter++;
                        st.push_back(t);
                        onstack[size_t(t)] = 1;
                        frames.push_back({t, 0});
                        descended = true;
                        break;
                    }
                    if (onstack[size_t(t)])
                        low[size_t(fr.v)] = std::min(low[size_t(fr.v)], num[size_t(t)]);
                }
                if (descended) continue;
                int v = fr.v;
                frames.pop_back();
                if (!frames.empty())
                    low[size_t(frames.back().v)] = std::min(low[size_t(frames.back().v)], low[size_t(v)]);
                if (low[size_t(v)] == num[size_t(v)]) {
                    for (;;) {
                        int w = st.back();
                        st.pop_back();
                        onstack[size_t(w)] = 0;
                        comp[size_t(w)] = ncomp;
                        if (w == v) break;
                    }
                    ++ncomp;
                }
            }
        }
        return comp;
    }
};

} // namespace nucdetail

inline NucleusResult nucleus(const Automaton& aut, int round_bound = 24,
                             int state_bound = 4096) {
    Automaton cur = aut; // assumed minimized and inverse-closed (from_json does both)
    NucleusResult res{cur, false, 0};
    for (int round = 0; round < round_bound; ++round) {
        nucdetail::PairGraph pg(cur);
        for (int g = 1; g < cur.state_count(); ++g)
            for (int h = 1; h < cur.state_count(); ++h)
                pg.ensure(pg.reduce(g, h));
        if (int(pg.verts.size()) > state_bound) break;
        std::vector<char> keep = pg.attractor();

        Automaton next(cur.alphabet());
        for (int s = 1; s < cur.state_count(); ++s) {
            const auto& st = cur.state(s);
            next.add_state(st.name, st.perm, st.rest);
        }
        // intern attractor pairs as states; their restriction targets are
        // attractor vertices as well (the attractor is closed forward)
        std::map<int, int> vert_state;
        for (size_t v = 0; v < pg.verts.size(); ++v) {
            auto [u, w] = pg.verts[v];
            if (w == 0) {
                vert_state[int(v)] = u; // single existing state
                continue;
            }
            if (!keep[v]) continue;
            const auto& su = cur.state(u);
            const auto& sw = cur.state(w);
            std::vector<int> perm(static_cast<size_t>(cur.alphabet()), 0);
            for (int x = 0; x < cur.alphabet(); ++x)
                perm[size_t(x)] = su.perm[size_t(sw.perm[size_t(x)])];
            vert_state[int(v)] = next.add_state("(" + su.name + "*" + sw.name + ")",
                                                std::move(perm),
                                                std::vector<int>(size_t(cur.alphabet()), 0));
        }
        for (size_t v = 0; v < pg.verts.size(); ++v) {
            if (pg.verts[v].second == 0 || !keep[v]) continue;
            for (int x = 0; x < cur.alphabet(); ++x) {
                int t = pg.edges[v][size_t(x)];
                auto it = vert_state.find(t);
                if (it == vert_state.end())
                    raise(errc::iteration_bound_exceeded, "attractor not forward closed");
                next.set_rest(vert_state[int(v)], x, it->second);
            }
        }
        std::vector<int> gens;
        for (int g : cur.generators()) gens.push_back(g);
        next.set_generators(gens);
        next.close_under_inverses();
        next.minimize();
        ++res.rounds;
        bool stable = next.state_count() == cur.state_count();
        if (stable || next.state_count() > state_bound) {
            res.automaton = std::move(next);
            res.complete = stable;
            return res;
        }
        cur = std::move(next);
    }
    res.automaton = std::move(cur);
    res.complete = false;
    return res;
}

// ---------------------------------------------------------------------------
// N_1: states g with a nonempty word w fixed by g and with g|_w = g.  On a
// minimized automaton these are exactly the states lying on a directed cycle
// of the fixed-letter graph (edges s -> s|_x whenever s fixes the letter x).

struct N1Element {
    int state = 0;
    Automaton::Letters witness;
    bool trivial = false; // the identity qualifies with any word
};

namespace nucdetail {

inline std::vector<std::vector<std::pair<int, int>>> fixed_letter_graph(const Automaton& a) {
    std::vector<std::vector<std::pair<int, int>>> adj(size_t(a.state_count()));
    for (int s = 0; s < a.state_count(); ++s)
        for (int x = 0; x < a.alphabet(); ++x)
            if (a.state(s).perm[size_t(x)] == x)
                adj[size_t(s)].push_back({x, a.state(s).rest[size_t(x)]});
    return adj;
}

} // namespace nucdetail

inline std::vector<N1Element> n1_elements(const Automaton& a) {
    auto adj = nucdetail::fixed_letter_graph(a);
    int n = a.state_count();
    std::vector<N1Element> out;
    for (int s = 0; s < n; ++s) {
        // BFS from the successors of s back to s, recording one path
        std::vector<int> prev_state(size_t(n), -1), prev_letter(size_t(n), -1);
        std::vector<char> seen(size_t(n), 0);
        std::vector<int> queue;
        bool found = false;
        Automaton::Letters witness;
        for (auto [x, t] : adj[size_t(s)]) {
            if (t == s) {
                witness = {x};
                found = true;
                break;
            }
            if (!seen[size_t(t)]) {
                seen[size_t(t)] = 1;
                prev_state[size_t(t)] = s;
                prev_letter[size_t(t)] = x;
                queue.push_back(t);
            }
        }
        for (size_t qi = 0; qi < queue.size() && !found; ++qi) {
            int v = queue[qi];
            for (auto [x, t] : adj[size_t(v)]) {
                if (t == s) {
                    // reconstruct path s -> ... -> v, then letter x
                    Automaton::Letters rev{x};
                    int cur = v;
                    while (cur != s) {
                        rev.push_back(prev_letter[size_t(cur)]);
                        cur = prev_state[size_t(cur)];
                    }
                    witness.assign(rev.rbegin(), rev.rend());
                    found = true;
                    break;
                }
                if (!seen[size_t(t)]) {
                    seen[size_t(t)] = 1;
                    prev_state[size_t(t)] = v;
                    prev_letter[size_t(t)] = x;
                    queue.push_back(t);
                }
            }
        }
        if (found) out.push_back({s, witness, s == 0});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed-end classification of a state.  Build the fixed-letter graph, trim to
// the live subgraph (vertices with an infinite outgoing path), then count the
// infinite paths from g: none, finitely many (all eventually periodic, each
// listed as preperiod+period), or infinitely many.

struct EndsClass {
    enum Kind { none, finite, infinite } kind = none;
    // eventually periodic ends, as (preperiod, period) letter strings
    std::vector<std::pair<Automaton::Letters, Automaton::Letters>> ends;
};

inline EndsClass ends_fixed_class(const Automaton& a, int g) {
    auto adj = nucdetail::fixed_letter_graph(a);
    int n = a.state_count();
    // live trimming: repeatedly delete vertices whose edges all lead to dead ends
    std::vector<char> alive(size_t(n), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!alive[size_t(s)]) continue;
            bool has = false;
            for (auto [x, t] : adj[size_t(s)])
                if (alive[size_t(t)]) { has = true; break; }
            if (!has) {
                alive[size_t(s)] = 0;
                changed = true;
            }
        }
    }
    EndsClass out;
    if (!alive[size_t(g)]) return out; // fixes no end

    // reachable live subgraph
    std::vector<char> reach(size_t(n), 0);
    std::vector<int> stack{g};
    reach[size_t(g)] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [x, t] : adj[size_t(v)])
            if (alive[size_t(t)] && !reach[size_t(t)]) {
                reach[size_t(t)] = 1;
                stack.push_back(t);
            }
    }
    // strongly connected components (iterative Tarjan)
    std::vector<int> comp(size_t(n), -1), low(size_t(n), 0), num(size_t(n), -1);
    std::vector<int> st;
    std::vector<char> onstack(size_t(n), 0);
    int counter = 0, ncomp = 0;
    struct Frame { int v; size_t edge; };
    for (int root = 0; root < n; ++root) {
        if (!reach[size_t(root)] || num[size_t(root)] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        num[size_t(root)] = low[size_t(root)] = counter++;
        st.push_back(root);
        onstack[size_t(root)] = 1;
        while (!frames.empty()) {
            auto& fr = frames.back();
            bool descended = false;
            while (fr.edge < adj[size_t(fr.v)].size()) {
                auto [x, t] = adj[size_t(fr.v)][fr.edge++];
                if (!alive[size_t(t)] || !reach[size_t(t)]) continue;
                if (num[size_t(t)] < 0) {
                    num[size_t(t)] = low[size_t(t)] = counter++;
                    st.push_back(t);
                    onstack[size_t(t)] = 1;
                    frames.push_back({t, 0});
                    descended = true;
                    break;
                }
                if (onstack[size_t(t)]) low[size_t(fr.v)] = std::min(low[size_t(fr.v)], num[size_t(t)]);
            }
            if (descended) continue;
            int v = fr.v;
            frames.pop_back();
            if (!frames.empty())
                low[size_t(frames.back().v)] = std::min(low[size_t(frames.back().v)], low[size_t(v)]);
            if (low[size_t(v)] == num[size_t(v)]) {
                for (;;) {
                    int w = st.back();
                    st.pop_back();
                    onstack[size_t(w)] = 0;
                    comp[size_t(w)] = ncomp;
                    if (w == v) break;
                }
                ++ncomp;
            }
        }
    }
    // classify SCCs: cyclic if size >= 2 or self-loop; count internal edges
    std::vector<int> comp_size(size_t(ncomp), 0), comp_internal(size_t(ncomp), 0);
    std::vector<char> comp_exit(size_t(ncomp), 0), comp_selfloop(size_t(ncomp), 0);
    for (int v = 0; v < n; ++v) {
        if (!reach[size_t(v)] || !alive[size_t(v)]) continue;
        ++comp_size[size_t(comp[size_t(v)])];
        for (auto [x, t] : adj[size_t(v)]) {
            if (!alive[size_t(t)]) continue;
            if (comp[size_t(t)] == comp[size_t(v)]) {
                ++comp_internal[size_t(comp[size_t(v)])];
                if (t == v) comp_selfloop[size_t(comp[size_t(v)])] = 1;
            } else {
                comp_exit[size_t(comp[size_t(v)])] = 1;
            }
        }
    }
    for (int c = 0; c < ncomp; ++c) {
        bool cyclic = comp_size[size_t(c)] >= 2 || comp_selfloop[size_t(c)];
        if (!cyclic) continue;
        if (comp_internal[size_t(c)] > comp_size[size_t(c)]) {
            out.kind = EndsClass::infinite; // more than one cycle inside
            return out;
        }
        if (comp_exit[size_t(c)]) {
            out.kind = EndsClass::infinite; // loop any number of times, then leave
            return out;
        }
    }
    // finite case: acyclic routing into terminal simple cycles; enumerate
    out.kind = EndsClass::finite;
    std::map<int, std::vector<std::pair<Automaton::Letters, Automaton::Letters>>> memo;
    std::vector<int> path; // cycle extraction helper
    std::function<std::vector<std::pair<Automaton::Letters, Automaton::Letters>>(int)> walk =
        [&](int v) -> std::vector<std::pair<Automaton::Letters, Automaton::Letters>> {
        auto it = memo.find(v);
        if (it != memo.end()) return it->second;
        std::vector<std::pair<Automaton::Letters, Automaton::Letters>> res;
        bool cyclic = comp_size[size_t(comp[size_t(v)])] >= 2 || comp_selfloop[size_t(comp[size_t(v)])];
        if (cyclic) {
            // terminal cycle: unique live out-edge per vertex; read the period
            Automaton::Letters period;
            int cur = v;
            do {
                for (auto [x, t] : adj[size_t(cur)])
                    if (alive[size_t(t)] && comp[size_t(t)] == comp[size_t(cur)]) {
                        period.push_back(x);
                        cur = t;
                        break;
                    }
            } while (cur != v);
            res.push_back({{}, period});
        } else {
            for (auto [x, t] : adj[size_t(v)]) {
                if (!alive[size_t(t)]) continue;
                for (auto [pre, per] : walk(t)) {
                    Automaton::Letters np{x};
                    np.insert(np.end(), pre.begin(), pre.end());
                    res.push_back({np, per});
                }
            }
        }
        memo[v] = res;
        return res;
    };
    out.ends = walk(g);
    return out;
}

} // namespace fixprop
