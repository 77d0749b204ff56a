#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fixprop {

// Edge-labeled directed graph of critical orbits: every vertex has exactly
// one outgoing edge, labeled with the ramification index at the source.
// Isomorphism respects criticality flags and edge labels but not the points
// themselves.
struct Portrait {
    struct Vertex {
        bool critical = false;
        int label = 1;          // e at this vertex (label of its out-edge)
        std::uint32_t ext_degree = 1; // where the point lives, informational
    };
    std::vector<Vertex> vertices;
    std::vector<int> succ;

    size_t size() const { return vertices.size(); }

    // Canonical string: AHU encodings of the hanging in-trees arranged around
    // each cycle, minimal rotation per component, components sorted.  Two
    // portraits are isomorphic iff their canonical strings match.
    std::string canonical() const {
        size_t n = vertices.size();
        std::vector<char> on_cycle(n, 0);
        // locate cycles by walking with step counts
        {
            std::vector<int> state(n, 0); // 0 unseen, 1 in progress, 2 done
            for (size_t s = 0; s < n; ++s) {
                if (state[s]) continue;
                std::vector<int> path;
                int v = int(s);
                while (state[size_t(v)] == 0) {
                    state[size_t(v)] = 1;
                    path.push_back(v);
                    v = succ[size_t(v)];
                }
                if (state[size_t(v)] == 1) {
                    // new cycle: mark from v around
                    int w = v;
                    do {
                        on_cycle[size_t(w)] = 1;
                        w = succ[size_t(w)];
                    } while (w != v);
                }
                for (int u : path) state[size_t(u)] = 2;
            }
        }
        // children = in-tree predecessors (cycle-to-cycle edges excluded)
        std::vector<std::vector<int>> children(n);
        for (size_t v = 0; v < n; ++v)
            if (!on_cycle[v]) children[size_t(succ[v])].push_back(int(v));

        std::function<std::string(int)> enc = [&](int v) -> std::string {
            std::vector<std::string> kids;
            for (int c : children[size_t(v)]) kids.push_back(enc(c));
            std::sort(kids.begin(), kids.end());
            std::string s = "(";
            s += vertices[size_t(v)].critical ? 'C' : 'o';
            s += std::to_string(vertices[size_t(v)].label);
            for (auto& k : kids) s += k;
            s += ')';
            return s;
        };

        std::vector<std::string> comps;
        std::vector<char> used(n, 0);
        for (size_t s = 0; s < n; ++s) {
            if (!on_cycle[s] || used[s]) continue;
            std::vector<std::string> ring;
            int v = int(s);
            do {
                used[size_t(v)] = 1;
                ring.push_back(enc(v));
                v = succ[size_t(v)];
            } while (v != int(s));
            // minimal rotation
            std::string best;
            for (size_t r = 0; r < ring.size(); ++r) {
                std::string cand = "[";
                for (size_t i = 0; i < ring.size(); ++i)
                    cand += ring[(r + i) % ring.size()];
                cand += ']';
                if (best.empty() || cand < best) best = cand;
            }
            comps.push_back(best);
        }
        std::sort(comps.begin(), comps.end());
        std::string out;
        for (auto& c : comps) out += c;
        return out;
    }

    std::size_t canonical_hash() const { return std::hash<std::string>{}(canonical()); }

    bool isomorphic(const Portrait& o) const {
        return size() == o.size() && canonical() == o.canonical();
    }

    // Convenience constructor from explicit edges v -> succ(v).
    static Portrait from_edges(const std::vector<std::tuple<bool, int, int>>& spec) {
        Portrait p;
        for (auto& [crit, label, to] : spec) {
            p.vertices.push_back({crit, label, 1});
            p.succ.push_back(to);
        }
        return p;
    }
};

// The portrait shapes a quadratic Lattes map can have, and the portrait of
// the degree-2 Chebyshev polynomial: a critical fixed point next to a
// critical chain of length two into a fixed point.
namespace portraits {

// c -> c -> o -> fix ; orbifold weights (2,4,4)
inline Portrait lattes_2_4_4() {
    return Portrait::from_edges({{true, 2, 1}, {true, 2, 2}, {false, 1, 3}, {false, 1, 3}});
}
// two disjoint chains c -> o -> fix ; weights (2,2,2,2)
inline Portrait lattes_2_2_2_2_double_fixed() {
    return Portrait::from_edges(
        {{true, 2, 1}, {false, 1, 2}, {false, 1, 2}, {true, 2, 4}, {false, 1, 5}, {false, 1, 5}});
}
// c -> o -> m1 <-> m2 <- o <- c ; weights (2,2,2,2)
inline Portrait lattes_2_2_2_2_two_cycle() {
    return Portrait::from_edges(
        {{true, 2, 1}, {false, 1, 2}, {false, 1, 3}, {false, 1, 2}, {false, 1, 3}, {true, 2, 4}});
}
// two chains of length two merging into m -> fix ; weights (2,2,2,2)
inline Portrait lattes_2_2_2_2_single_fixed() {
    return Portrait::from_edges(
        {{true, 2, 1}, {false, 1, 2}, {false, 1, 3}, {false, 1, 3}, {true, 2, 5}, {false, 1, 2}});
}
// critical fixed point, plus c -> o -> fix
inline Portrait chebyshev() {
    return Portrait::from_edges({{true, 2, 0}, {true, 2, 2}, {false, 1, 3}, {false, 1, 3}});
}

struct Named {
    const char* name;
    Portrait shape;
};

inline const std::vector<Named>& lattes_shapes() {
    static const std::vector<Named> shapes = {
        {"2_4_4", lattes_2_4_4()},
        {"2_2_2_2_double_fixed", lattes_2_2_2_2_double_fixed()},
        {"2_2_2_2_two_cycle", lattes_2_2_2_2_two_cycle()},
        {"2_2_2_2_single_fixed", lattes_2_2_2_2_single_fixed()},
    };
    return shapes;
}

} // namespace portraits

} // namespace fixprop
