#include <catch2/catch_amalgamated.hpp>

#include "fixprop/catalog.hpp"
#include "fixprop/group_stats.hpp"

using namespace fixprop;

TEST_CASE("all shipped entries load and validate") {
    for (const std::string& name : catalog_names()) {
        INFO("entry " << name);
        CatalogEntry e;
        CHECK_NOTHROW(e = load_entry(name));
        CHECK(e.consistent);
        CHECK(e.nucleus_result.complete);
    }
}

TEST_CASE("data files agree with the builtin entries") {
    for (auto& [name, text] : catalogdetail::builtin_entries()) {
        std::ifstream in(std::string(FIXPROP_DATA_DIR) + "/" + name + ".json");
        REQUIRE(in.good());
        auto from_file = nlohmann::json::parse(in);
        auto builtin = nlohmann::json::parse(text);
        CHECK(from_file == builtin);
    }
}

TEST_CASE("chebyshev entry specifics") {
    CatalogEntry e = load_entry("chebyshev2");
    const Automaton& a = e.automaton;
    int sa = a.resolve("a"), sb = a.resolve("b");
    SECTION("generators are involutions at every level (exact word test)") {
        CHECK(a.is_trivial({sa, sa}));
        CHECK(a.is_trivial({sb, sb}));
    }
    SECTION("dihedral signature: ab has order >= 2^(n-1) at level n") {
        for (int n = 2; n <= 8; ++n) {
            LevelQuotient q = LevelQuotient::build(a, n);
            Perm p = q.word_perm({sa, sb});
            // order of the permutation restricted to level n
            std::uint64_t lo = q.domain().level_begin(n), sz = q.domain().level_size(n);
            std::uint64_t order = 1;
            std::vector<char> seen(sz, 0);
            for (std::uint64_t s = 0; s < sz; ++s) {
                if (seen[s]) continue;
                std::uint64_t len = 0, cur = lo + s;
                do {
                    seen[cur - lo] = 1;
                    cur = p[cur];
                    ++len;
                } while (cur != lo + s);
                order = std::lcm(order, len);
            }
            CHECK(order >= (std::uint64_t(1) << (n - 1)));
        }
    }
}

TEST_CASE("entry validation failures are reported") {
    SECTION("tampered expectations fail") {
        auto j = nlohmann::json::parse(catalogdetail::builtin_entries()[0].second);
        j["expect"]["exceptional"] = true; // odometer's map x^2 is not exceptional
        CatalogEntry e = parse_entry(j);
        CHECK_THROWS_AS(validate_entry(e), error);
    }
    SECTION("unknown names are rejected") {
        CHECK_THROWS_AS(load_entry("no-such-entry"), error);
    }
    SECTION("a bare automaton JSON loads without map data") {
        CatalogEntry e = load_entry(std::string(FIXPROP_DATA_DIR) + "/basilica.json");
        CHECK(e.map_expr == "x^2-1");
    }
}

TEST_CASE("odometer FPP from the catalog entry") {
    CatalogEntry e = load_entry("odometer", /*validate=*/false);
    for (int n = 1; n <= 6; ++n) {
        LevelQuotient q = LevelQuotient::build(e.automaton, n);
        CHECK(fpp_exact(q) == Rat64(1, std::int64_t(1) << n));
    }
}
