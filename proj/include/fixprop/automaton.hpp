#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace fixprop {

// Finite-state wreath recursion on the d-ary tree.  Each state carries a
// permutation of X = {0..d-1} and a restriction state per letter; state 0 is
// always the identity.  After minimize(), distinct states are distinct tree
// automorphisms, and every state has its inverse present (inv[]).
//
// Group elements are words over state indices; the word [s1, s2, ..., sk]
// denotes the product s1 s2 ... sk, which acts with sk applied first.
class Automaton {
public:
    using Word = std::vector<int>;

    struct State {
        std::string name;
        std::vector<int> perm; // images of 0..d-1
        std::vector<int> rest; // restriction state per letter
    };

    Automaton() = default;
    explicit Automaton(int alphabet) : d_(alphabet) {
        State id;
        id.name = "id";
        id.perm.resize(size_t(d_));
        id.rest.assign(size_t(d_), 0);
        for (int x = 0; x < d_; ++x) id.perm[size_t(x)] = x;
        states_.push_back(std::move(id));
        inv_.push_back(0);
    }

    int alphabet() const { return d_; }
    int state_count() const { return int(states_.size()); }
    const State& state(int s) const { return states_[size_t(s)]; }
    int inverse_state(int s) const { return inv_[size_t(s)]; }
    const std::vector<int>& generators() const { return generators_; }
    const std::string& name() const { return name_; }

    int state_by_name(const std::string& n) const {
        for (int s = 0; s < state_count(); ++s)
            if (states_[size_t(s)].name == n) return s;
        raise(errc::validation_error, "unknown state '" + n + "'");
    }

    // ---- construction -----------------------------------------------------

    int add_state(const std::string& n, std::vector<int> perm, std::vector<int> rest) {
        if (int(perm.size()) != d_ || int(rest.size()) != d_)
            raise(errc::schema_error, "state '" + n + "' has wrong arity");
        std::vector<char> seen(size_t(d_), 0);
        for (int x : perm) {
            if (x < 0 || x >= d_ || seen[size_t(x)])
                raise(errc::schema_error, "state '" + n + "' perm is not a permutation");
            seen[size_t(x)] = 1;
        }
        states_.push_back({n, std::move(perm), std::move(rest)});
        inv_.push_back(-1);
        return state_count() - 1;
    }

    void set_generators(std::vector<int> gens) { generators_ = std::move(gens); }

    void set_rest(int s, int x, int target) {
        states_[size_t(s)].rest[size_t(x)] = target;
    }

    // Parses the wire schema:
    // { "name": str, "alphabet_size": d,
    //   "states": { name: {"perm": [...], "rest": [names]} },
    //   "generators": [names] }
    // The identity state "id" is implicit and reserved.
    static Automaton from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("alphabet_size") || !j.contains("states") ||
            !j.contains("generators"))
            raise(errc::schema_error, "automaton JSON needs alphabet_size, states, generators");
        int d = j.at("alphabet_size").get<int>();
        if (d < 2) raise(errc::schema_error, "alphabet_size must be at least 2");
        Automaton a(d);
        if (j.contains("name")) a.name_ = j.at("name").get<std::string>();
        const auto& states = j.at("states");
        if (!states.is_object()) raise(errc::schema_error, "states must be an object");
        std::vector<std::string> order;
        for (auto it = states.begin(); it != states.end(); ++it) order.push_back(it.key());
        std::sort(order.begin(), order.end());
        std::map<std::string, int> index{{"id", 0}};
        for (const auto& n : order) {
            if (n == "id") raise(errc::schema_error, "state name 'id' is reserved");
            index[n] = int(index.size());
        }
        for (const auto& n : order) {
            const auto& st = states.at(n);
            if (!st.contains("perm") || !st.contains("rest"))
                raise(errc::schema_error, "state '" + n + "' needs perm and rest");
            std::vector<int> perm = st.at("perm").get<std::vector<int>>();
            std::vector<int> rest;
            for (const auto& rn : st.at("rest")) {
                auto it = index.find(rn.get<std::string>());
                if (it == index.end())
                    raise(errc::schema_error, "state '" + n + "' references unknown state");
                rest.push_back(it->second);
            }
            a.add_state(n, std::move(perm), std::move(rest));
        }
        std::vector<int> gens;
        for (const auto& g : j.at("generators")) {
            auto it = index.find(g.get<std::string>());
            if (it == index.end()) raise(errc::schema_error, "unknown generator");
            if (it->second == 0) raise(errc::schema_error, "identity cannot be a generator");
            gens.push_back(it->second);
        }
        if (gens.empty()) raise(errc::schema_error, "generator list is empty");
        a.set_generators(std::move(gens));
        a.close_under_inverses();
        a.minimize();
        return a;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["name"] = name_;
        j["alphabet_size"] = d_;
        nlohmann::ordered_json st = nlohmann::ordered_json::object();
        for (int s = 1; s < state_count(); ++s) {
            nlohmann::ordered_json one;
            one["perm"] = states_[size_t(s)].perm;
            std::vector<std::string> rest;
            for (int r : states_[size_t(s)].rest) rest.push_back(states_[size_t(r)].name);
            one["rest"] = rest;
            st[states_[size_t(s)].name] = one;
        }
        j["states"] = st;
        std::vector<std::string> gens;
        for (int g : generators_) gens.push_back(states_[size_t(g)].name);
        j["generators"] = gens;
        return j;
    }

    // Appends the inverse of every state (identity aside) and wires inv[].
    // The inverse of s permutes by perm^-1 and restricts at x to the inverse
    // of s's restriction at perm^-1(x).
    void close_under_inverses() {
        int original = state_count();
        std::vector<int> inv_index(size_t(original), -1);
        inv_index[0] = 0;
        for (int s = 1; s < original; ++s)
            inv_index[size_t(s)] = original + s - 1;
        for (int s = 1; s < original; ++s) {
            const State& st = states_[size_t(s)];
            State is;
            is.name = st.name + "^-1";
            is.perm.assign(size_t(d_), 0);
            is.rest.assign(size_t(d_), 0);
            for (int x = 0; x < d_; ++x) is.perm[size_t(st.perm[size_t(x)])] = x;
            for (int x = 0; x < d_; ++x) {
                int y = is.perm[size_t(x)]; // = perm^-1(x)
                is.rest[size_t(x)] = inv_index[size_t(st.rest[size_t(y)])];
            }
            states_.push_back(std::move(is));
            inv_.push_back(s);
            inv_[size_t(s)] = state_count() - 1;
        }
    }

    // Partition refinement on (perm, restriction classes) until stable, then
    // rebuild with one state per class.  Afterwards state equality is
    // equality of tree automorphisms.
    void minimize() {
        int n = state_count();
        std::vector<int> cls(static_cast<size_t>(n), 0);
        {
            std::map<std::vector<int>, int> by_perm;
            for (int s = 0; s < n; ++s) {
                auto it = by_perm.emplace(states_[size_t(s)].perm, int(by_perm.size())).first;
                cls[size_t(s)] = it->second;
            }
        }
        for (;;) {
            std::map<std::vector<int>, int> sig;
            std::vector<int> next(static_cast<size_t>(n), 0);
            for (int s = 0; s < n; ++s) {
                std::vector<int> key{cls[size_t(s)]};
                for (int x = 0; x < d_; ++x)
                    key.push_back(cls[size_t(states_[size_t(s)].rest[size_t(x)])]);
                auto it = sig.emplace(std::move(key), int(sig.size())).first;
                next[size_t(s)] = it->second;
            }
            if (next == cls) break;
            cls = std::move(next);
        }
        // representative per class; identity class keeps index 0
        int nclasses = 1 + *std::max_element(cls.begin(), cls.end());
        std::vector<int> rep(size_t(nclasses), -1);
        std::vector<int> order; // classes in first-seen order, identity first
        order.push_back(cls[0]);
        rep[size_t(cls[0])] = 0;
        for (int s = 1; s < n; ++s)
            if (rep[size_t(cls[size_t(s)])] < 0) {
                rep[size_t(cls[size_t(s)])] = s;
                order.push_back(cls[size_t(s)]);
            }
        std::vector<int> newindex(size_t(nclasses), -1);
        for (size_t i = 0; i < order.size(); ++i) newindex[size_t(order[i])] = int(i);
        std::vector<State> ns;
        std::vector<int> ninv;
        for (int c : order) {
            const State& st = states_[size_t(rep[size_t(c)])];
            State out;
            out.name = st.name;
            out.perm = st.perm;
            for (int x = 0; x < d_; ++x)
                out.rest.push_back(newindex[size_t(cls[size_t(st.rest[size_t(x)])])]);
            ns.push_back(std::move(out));
            ninv.push_back(newindex[size_t(cls[size_t(inv_[size_t(rep[size_t(c)])])])]);
        }
        for (int& g : generators_) g = newindex[size_t(cls[size_t(g)])];
        name_map_.clear();
        for (int s = 0; s < n; ++s) name_map_[states_[size_t(s)].name] = newindex[size_t(cls[size_t(s)])];
        states_ = std::move(ns);
        inv_ = std::move(ninv);
        states_[0].name = "id";
    }

    // Minimized state index for an original state name (survives merging).
    int resolve(const std::string& n) const {
        auto it = name_map_.find(n);
        if (it != name_map_.end()) return it->second;
        return state_by_name(n);
    }

    // ---- action on words over X --------------------------------------------

    using Letters = std::vector<int>;

    void check_letters(const Letters& w) const {
        for (int x : w)
            if (x < 0 || x >= d_) raise(errc::bad_letter, "letter out of range");
    }

    Letters act_state(int s, const Letters& w) const {
        check_letters(w);
        Letters out;
        out.reserve(w.size());
        int cur = s;
        for (int x : w) {
            out.push_back(states_[size_t(cur)].perm[size_t(x)]);
            cur = states_[size_t(cur)].rest[size_t(x)];
        }
        return out;
    }

    int restrict_state(int s, const Letters& w) const {
        check_letters(w);
        int cur = s;
        for (int x : w) cur = states_[size_t(cur)].rest[size_t(x)];
        return cur;
    }

    Word reduce(Word w) const {
        Word out;
        for (int s : w) {
            if (s == 0) continue;
            if (!out.empty() && out.back() == inv_[size_t(s)])
                out.pop_back();
            else
                out.push_back(s);
        }
        return out;
    }

    Word inverse_word(const Word& w) const {
        Word out;
        for (size_t i = w.size(); i-- > 0;) out.push_back(inv_[size_t(w[i])]);
        return out;
    }

    // g(v) for a word g; the rightmost factor acts first.
    Letters act(const Word& g, Letters v) const {
        for (size_t i = g.size(); i-- > 0;) v = act_state(g[i], v);
        return v;
    }

    // g|_v as a reduced word: (s1...sk)|_v = s1|_{(s2..sk)(v)} ... sk|_v.
    Word restrict(const Word& g, const Letters& v) const {
        check_letters(v);
        Word out(g.size(), 0);
        Letters cur = v;
        for (size_t i = g.size(); i-- > 0;) {
            out[i] = restrict_state(g[i], cur);
            cur = act_state(g[i], cur);
        }
        return reduce(out);
    }

    // Word triviality by breadth-first search over restriction words: every
    // reachable restriction must act trivially on X.  Restriction never
    // lengthens a word, so the search space is finite.
    bool is_trivial(const Word& g) const {
        Word start = reduce(g);
        if (start.empty()) return true;
        std::set<Word> seen;
        std::vector<Word> queue{start};
        seen.insert(start);
        while (!queue.empty()) {
            Word w = std::move(queue.back());
            queue.pop_back();
            for (int x = 0; x < d_; ++x) {
                // image of x under the word
                int letter = x;
                for (size_t i = w.size(); i-- > 0;)
                    letter = states_[size_t(w[i])].perm[size_t(letter)];
                if (letter != x) return false;
                Word r = restrict(w, {x});
                if (!r.empty() && seen.insert(r).second) queue.push_back(r);
            }
        }
        return true;
    }

    bool equal_words(const Word& a, const Word& b) const {
        Word w = a;
        Word ib = inverse_word(b);
        w.insert(w.end(), ib.begin(), ib.end());
        return is_trivial(w);
    }

private:
    int d_ = 0;
    std::string name_;
    std::vector<State> states_;
    std::vector<int> inv_;
    std::vector<int> generators_;
    std::map<std::string, int> name_map_;
};

} // namespace fixprop
