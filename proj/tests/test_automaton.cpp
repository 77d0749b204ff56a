#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixprop/automaton.hpp"

using namespace fixprop;
using nlohmann::json;

namespace {

Automaton from_text(const std::string& text) { return Automaton::from_json(json::parse(text)); }

// a = s(b, 1), b = (a, 1)
const char* kBasilica = R"({
  "name": "basilica", "alphabet_size": 2,
  "states": {
    "a": {"perm": [1, 0], "rest": ["b", "id"]},
    "b": {"perm": [0, 1], "rest": ["a", "id"]}
  },
  "generators": ["a", "b"]
})";

// a = s(1, a)
const char* kOdometer = R"({
  "name": "odometer", "alphabet_size": 2,
  "states": {"a": {"perm": [1, 0], "rest": ["id", "a"]}},
  "generators": ["a"]
})";

// a = s(1, 1), b = (a, b)
const char* kChebyshev = R"({
  "name": "chebyshev2", "alphabet_size": 2,
  "states": {
    "a": {"perm": [1, 0], "rest": ["id", "id"]},
    "b": {"perm": [0, 1], "rest": ["a", "b"]}
  },
  "generators": ["a", "b"]
})";

} // namespace

TEST_CASE("schema validation") {
    CHECK_THROWS_AS(from_text(R"({"alphabet_size": 2})"), error);
    CHECK_THROWS_AS(from_text(R"({"name":"x","alphabet_size":2,"states":{"a":{"perm":[0,0],"rest":["id","id"]}},"generators":["a"]})"),
                    error); // not a permutation
    CHECK_THROWS_AS(from_text(R"({"name":"x","alphabet_size":2,"states":{"a":{"perm":[1,0],"rest":["zz","id"]}},"generators":["a"]})"),
                    error); // dangling reference
    CHECK_THROWS_AS(from_text(R"({"name":"x","alphabet_size":2,"states":{"id":{"perm":[1,0],"rest":["id","id"]}},"generators":["id"]})"),
                    error); // reserved name
    CHECK_NOTHROW(from_text(kBasilica));
}

TEST_CASE("inverse synthesis and minimization") {
    Automaton aut = from_text(kChebyshev);
    int a = aut.resolve("a"), b = aut.resolve("b");
    SECTION("involutions fold onto themselves") {
        CHECK(aut.inverse_state(a) == a);
        CHECK(aut.inverse_state(b) == b);
        // a = s(1,1) and b = (a,b) generate an automaton with only 3 states
        CHECK(aut.state_count() == 3);
    }
    SECTION("g * g^-1 is trivial for random words") {
        Automaton bas = from_text(kBasilica);
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 50; ++trial) {
            Automaton::Word w;
            for (int i = 0; i < 8; ++i)
                w.push_back(1 + int(rng() % size_t(bas.state_count() - 1)));
            Automaton::Word gg = w;
            auto iw = bas.inverse_word(w);
            gg.insert(gg.end(), iw.begin(), iw.end());
            CHECK(bas.is_trivial(gg));
        }
    }
    SECTION("duplicate states are merged") {
        Automaton aut2(2);
        int s1 = aut2.add_state("u", {1, 0}, {0, 0});
        int s2 = aut2.add_state("v", {1, 0}, {0, 0});
        aut2.set_generators({s1, s2});
        aut2.close_under_inverses();
        aut2.minimize();
        CHECK(aut2.resolve("u") == aut2.resolve("v"));
        // u is an involution: u^-1 merges too => states are just {id, u}
        CHECK(aut2.state_count() == 2);
    }
}

TEST_CASE("action and restriction") {
    Automaton bas = from_text(kBasilica);
    int a = bas.resolve("a"), b = bas.resolve("b");
    SECTION("basilica: act(a, 00) = 10") {
        CHECK(bas.act({a}, {0, 0}) == Automaton::Letters{1, 0});
    }
    SECTION("identity acts trivially") {
        CHECK(bas.act({}, {0, 1, 1}) == Automaton::Letters{0, 1, 1});
        CHECK(bas.act({0}, {1, 0}) == Automaton::Letters{1, 0});
    }
    SECTION("chebyshev b fixes the letter 1") {
        Automaton cheb = from_text(kChebyshev);
        int cb = cheb.resolve("b");
        CHECK(cheb.act({cb}, {1}) == Automaton::Letters{1});
    }
    SECTION("restrict(a*a, 0) = b") {
        Automaton::Word sq{a, a};
        CHECK(bas.restrict(sq, {0}) == Automaton::Word{b});
        CHECK(bas.restrict(sq, {1}) == Automaton::Word{b});
    }
    SECTION("restrict at the empty word is the element itself") {
        Automaton::Word w{a, b, a};
        CHECK(bas.restrict(w, {}) == bas.reduce(w));
    }
    SECTION("letters out of range are rejected") {
        CHECK_THROWS_AS(bas.act({a}, {2}), error);
    }
}

TEST_CASE("wreath recursion laws on random data") {
    for (const char* text : {kBasilica, kOdometer, kChebyshev}) {
        Automaton aut = from_text(text);
        std::mt19937_64 rng(99);
        auto rand_word = [&](int len) {
            Automaton::Word w;
            for (int i = 0; i < len; ++i)
                w.push_back(1 + int(rng() % size_t(aut.state_count() - 1)));
            return aut.reduce(w);
        };
        auto rand_letters = [&](int len) {
            Automaton::Letters v;
            for (int i = 0; i < len; ++i) v.push_back(int(rng() % size_t(aut.alphabet())));
            return v;
        };
        for (int trial = 0; trial < 300; ++trial) {
            auto g = rand_word(4), h = rand_word(4);
            auto v = rand_letters(1 + int(rng() % 6));
            Automaton::Word gh = g;
            gh.insert(gh.end(), h.begin(), h.end());
            // (gh)(v) = g(h(v))
            CHECK(aut.act(gh, v) == aut.act(g, aut.act(h, v)));
            // (gh)|_v = g|_{h(v)} h|_v
            auto lhs = aut.restrict(gh, v);
            auto rhs = aut.restrict(g, aut.act(h, v));
            auto hv = aut.restrict(h, v);
            rhs.insert(rhs.end(), hv.begin(), hv.end());
            CHECK(aut.equal_words(lhs, rhs));
            // nested restriction g|_{vw} = (g|_v)|_w
            auto w = rand_letters(1 + int(rng() % 4));
            Automaton::Letters vw = v;
            vw.insert(vw.end(), w.begin(), w.end());
            CHECK(aut.equal_words(aut.restrict(g, vw), aut.restrict(aut.restrict(g, v), w)));
        }
    }
}

TEST_CASE("round trip through JSON") {
    Automaton bas = from_text(kBasilica);
    Automaton again = Automaton::from_json(json::parse(bas.to_json().dump()));
    CHECK(again.state_count() == bas.state_count());
    CHECK(again.alphabet() == 2);
    // same action on a few words
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        Automaton::Letters v;
        for (int k = 0; k < 6; ++k) v.push_back(int(rng() % 2));
        CHECK(bas.act({bas.resolve("a")}, v) == again.act({again.resolve("a")}, v));
    }
}
