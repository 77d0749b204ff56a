#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fixprop/level_quotient.hpp"

using namespace fixprop;
using nlohmann::json;

namespace {

Automaton from_text(const std::string& text) { return Automaton::from_json(json::parse(text)); }

const char* kBasilica = R"({
  "name": "basilica", "alphabet_size": 2,
  "states": {
    "a": {"perm": [1, 0], "rest": ["b", "id"]},
    "b": {"perm": [0, 1], "rest": ["a", "id"]}
  },
  "generators": ["a", "b"]
})";

const char* kOdometer = R"({
  "name": "odometer", "alphabet_size": 2,
  "states": {"a": {"perm": [1, 0], "rest": ["id", "a"]}},
  "generators": ["a"]
})";

const char* kChebyshev = R"({
  "name": "chebyshev2", "alphabet_size": 2,
  "states": {
    "a": {"perm": [1, 0], "rest": ["id", "id"]},
    "b": {"perm": [0, 1], "rest": ["a", "b"]}
  },
  "generators": ["a", "b"]
})";

const char* kTrivial = R"({
  "name": "trivial", "alphabet_size": 2,
  "states": {"e": {"perm": [0, 1], "rest": ["id", "id"]}},
  "generators": ["e"]
})";

// ternary odometer, for a d = 3 sanity point
const char* kOdometer3 = R"({
  "name": "odometer3", "alphabet_size": 3,
  "states": {"a": {"perm": [1, 2, 0], "rest": ["id", "id", "a"]}},
  "generators": ["a"]
})";

// independent oracle: BFS closure over permutation multiplication
std::uint64_t closure_order(const std::vector<Perm>& gens, std::uint64_t cap) {
    std::set<Perm> seen;
    std::vector<Perm> queue;
    Perm id = perm_identity(gens.empty() ? 1 : gens[0].size());
    seen.insert(id);
    queue.push_back(id);
    Perm tmp;
    while (!queue.empty()) {
        Perm cur = std::move(queue.back());
        queue.pop_back();
        for (const Perm& g : gens) {
            perm_compose(tmp, cur, g);
            if (seen.insert(tmp).second) {
                if (seen.size() > cap) return cap + 1;
                queue.push_back(tmp);
            }
        }
    }
    return seen.size();
}

} // namespace

TEST_CASE("chain orders match brute-force closure") {
    for (const char* text : {kBasilica, kOdometer, kChebyshev, kOdometer3}) {
        Automaton aut = from_text(text);
        for (int n = 1; n <= 4; ++n) {
            LevelQuotient q = LevelQuotient::build(aut, n);
            std::uint64_t oracle = closure_order(q.generator_perms(), 2'000'000);
            CHECK(q.order() == BigInt(oracle));
        }
    }
    // a deeper spot check on the odometer: order 2^n exactly
    Automaton odo = from_text(kOdometer);
    for (int n = 1; n <= 10; ++n) {
        LevelQuotient q = LevelQuotient::build(odo, n);
        CHECK(q.order() == BigInt(1) << n);
    }
    Automaton triv = from_text(kTrivial);
    CHECK(LevelQuotient::build(triv, 3).order() == 1);
    Automaton bas = from_text(kBasilica);
    CHECK(LevelQuotient::build(bas, 1).order() == 2);
}

TEST_CASE("kernel of the level restriction") {
    Automaton odo = from_text(kOdometer);
    SECTION("odometer H_2 has order 2 (generated by a^2)") {
        LevelQuotient q = LevelQuotient::build(odo, 2);
        CHECK(q.kernel_order(2) == 2);
        // the nontrivial kernel element is the square of the generator
        Perm a = q.generator_perms()[0], sq;
        perm_compose(sq, a, a);
        auto gens = q.kernel_generators(2);
        REQUIRE(gens.size() >= 1);
        bool found = false;
        for (auto* g : gens)
            if (*g == sq) found = true;
        CHECK(found);
    }
    SECTION("order product law |G_n| = |G_{n-1}| * |H_n|") {
        for (const char* text : {kBasilica, kOdometer, kChebyshev, kOdometer3}) {
            Automaton aut = from_text(text);
            for (int n = 2; n <= 5; ++n) {
                LevelQuotient qn = LevelQuotient::build(aut, n);
                LevelQuotient qm = LevelQuotient::build(aut, n - 1);
                CHECK(qn.order() == qm.order() * qn.kernel_order(n));
            }
        }
    }
}

TEST_CASE("enumeration and sampling") {
    Automaton bas = from_text(kBasilica);
    LevelQuotient q = LevelQuotient::build(bas, 3);
    std::uint64_t order = q.order_u64();

    SECTION("enumeration visits every element once") {
        std::set<Perm> seen;
        q.group().enumerate([&](const Perm& p) { seen.insert(p); });
        CHECK(seen.size() == order);
    }
    SECTION("suffix enumeration yields the kernel exactly") {
        std::uint64_t from = q.domain().level_begin(3);
        std::set<Perm> seen;
        q.group().enumerate([&](const Perm& p) { seen.insert(p); }, from);
        CHECK(BigInt(seen.size()) == q.kernel_order(3));
        for (const Perm& p : seen)
            for (std::uint64_t i = 0; i < from; ++i) CHECK(p[i] == i);
    }
    SECTION("sampler frequencies match enumeration within 3 sigma") {
        std::set<Perm> all;
        q.group().enumerate([&](const Perm& p) { all.insert(p); });
        std::map<Perm, int> counts;
        std::mt19937_64 rng(12345);
        const int N = 20000;
        for (int i = 0; i < N; ++i) {
            Perm p = q.group().sample(rng);
            CHECK(all.count(p) == 1); // sampled elements lie in the group
            ++counts[p];
        }
        double expect = double(N) / double(order);
        double sigma = std::sqrt(expect * (1.0 - 1.0 / double(order)));
        for (const Perm& p : all) {
            double got = counts.count(p) ? double(counts.at(p)) : 0.0;
            CHECK(std::abs(got - expect) <= 3.5 * sigma + 1e-9);
        }
    }
}

TEST_CASE("transitivity checks") {
    CHECK(LevelQuotient::build(from_text(kOdometer), 6).transitive_on_level(6));
    CHECK(LevelQuotient::build(from_text(kBasilica), 6).transitive_on_level(6));
    CHECK_FALSE(LevelQuotient::build(from_text(kTrivial), 2).transitive_on_level(1));
    // ternary odometer acts as a 3^n cycle: transitive but not doubly so
    LevelQuotient q3 = LevelQuotient::build(from_text(kOdometer3), 3);
    CHECK(q3.transitive_on_level(3));
    CHECK_FALSE(q3.doubly_transitive_on_letters());
}

TEST_CASE("degree budget") {
    Automaton odo = from_text(kOdometer);
    CHECK_THROWS_AS(LevelQuotient::build(odo, 40), error);
}

TEST_CASE("basilica level orders grow as expected") {
    // spot values, fixed by the brute-force oracle at small levels
    Automaton bas = from_text(kBasilica);
    std::vector<std::uint64_t> orders;
    for (int n = 1; n <= 4; ++n)
        orders.push_back(LevelQuotient::build(bas, n).order_u64());
    CHECK(orders[0] == 2);
    CHECK(orders[1] == 8);
    CHECK(orders[2] == closure_order(LevelQuotient::build(bas, 3).generator_perms(), 1 << 20));
    CHECK(orders[3] == closure_order(LevelQuotient::build(bas, 4).generator_perms(), 1 << 20));
}
