#include <catch2/catch_amalgamated.hpp>

#include "fixprop/lattes.hpp"

using namespace fixprop;

TEST_CASE("curve point counts") {
    SECTION("p = 5: four points, by hand (0,0), (2,0), (3,0), infinity") {
        CHECK(count_curve_points(5) == 4);
    }
    SECTION("Hasse bound and parity for p = 13, 17, 29") {
        for (std::uint64_t p : {13ull, 17ull, 29ull}) {
            std::uint64_t cnt = count_curve_points(p);
            std::int64_t r = std::int64_t(p) + 1 - std::int64_t(cnt);
            CHECK(double(r) * double(r) <= 4.0 * double(p));
            CHECK(((r % 4) + 4) % 4 == 2); // full 2-torsion forces r = 2 mod 4
            CHECK(cnt % 4 == 0);
        }
    }
    SECTION("wrong residue class is rejected") {
        CHECK_THROWS_AS(count_curve_points(7), error);
        CHECK_THROWS_AS(count_curve_points(3), error);
    }
}

TEST_CASE("frobenius element") {
    SECTION("p = 5: r = 2 gives 1 + 2i of norm 5") {
        GaussianInt pi = frobenius_pi(5, 2);
        CHECK(pi.re == 1);
        CHECK(pi.im == 2);
        CHECK(pi.norm() == 5);
    }
    SECTION("norm is p for all audited primes") {
        for (std::uint64_t p : {5ull, 13ull, 17ull, 29ull}) {
            std::int64_t r = std::int64_t(p) + 1 - std::int64_t(count_curve_points(p));
            CHECK(frobenius_pi(p, r).norm() == cpp_int(p));
        }
    }
    SECTION("valuations are invariant under conjugation") {
        for (std::uint64_t p : {5ull, 13ull, 17ull}) {
            std::int64_t r = std::int64_t(p) + 1 - std::int64_t(count_curve_points(p));
            GaussianInt pi = frobenius_pi(p, r);
            GaussianInt pib = pi.conj();
            for (int n = 1; n <= 6; ++n) {
                GaussianInt one{1, 0};
                CHECK(wp_valuation(pi.pow(n) - one) == wp_valuation(pib.pow(n) - one));
                CHECK(wp_valuation(pi.pow(n) + one) == wp_valuation(pib.pow(n) + one));
            }
        }
    }
}

TEST_CASE("valuation at the ramified prime") {
    CHECK(wp_valuation(GaussianInt{1, 1}) == 1);
    CHECK(wp_valuation(GaussianInt{2, 0}) == 2);
    CHECK(wp_valuation(GaussianInt{0, 2}) == 2);   // pi_5 - 1 = 2i
    CHECK(wp_valuation(GaussianInt{2, 2}) == 3);   // pi_5 + 1 = 2 + 2i
    CHECK(std::min(2, 3) <= 2);                    // v(2) = 2 >= min of the pair
    CHECK_THROWS_AS(wp_valuation(GaussianInt{0, 0}), error);
}

TEST_CASE("level audits for p = 5") {
    auto rep = lattes_audit(5, 6, 20000);
    REQUIRE(rep.levels.size() == 6);
    CHECK(rep.curve_points == 4);
    CHECK(rep.trace == 2);
    CHECK(rep.k_rank == 1); // smallest root of -1/4 = 1 in F_5

    SECTION("frozen level-1 and level-2 data") {
        const LattesLevel& l1 = rep.levels[0];
        CHECK(l1.size_a == 0);
        CHECK(l1.size_b == 6);
        CHECK(l1.v_minus == 2);
        CHECK(l1.v_plus == 3);
        CHECK(l1.periodic_b == 1); // only infinity
        CHECK(l1.proportion == Rat64(1, 6));

        const LattesLevel& l2 = rep.levels[1];
        CHECK(l2.size_a == 18);
        CHECK(l2.size_b == 8);
        CHECK(l2.v_minus == 5);
        CHECK(l2.periodic_a == 1);
        CHECK(l2.periodic_b == 2);
        CHECK(l2.proportion == Rat64(3, 26));
    }
    SECTION("structural audits pass at every level") {
        for (const auto& l : rep.levels) {
            CHECK(l.invariance_ok);
            CHECK(l.tree_audit_ok);
            CHECK(l.side_proportion_ok);
            CHECK(l.hasse_ok);
            CHECK(std::min(l.v_minus, l.v_plus) <= 2);
            CHECK(l.size_a + l.size_b == l.total);
        }
    }
    SECTION("both square roots of -1/4 give identical proportions") {
        std::uint64_t other_k = 5 - rep.k_rank; // the conjugate root
        for (int n = 1; n <= 3; ++n) {
            LattesLevel a = lattes_level_audit(5, n, rep.k_rank, rep.pi);
            LattesLevel b = lattes_level_audit(5, n, other_k, rep.pi);
            CHECK(a.proportion == b.proportion);
            CHECK(a.size_a == b.size_a);
        }
    }
}

TEST_CASE("level audits for p = 13") {
    auto rep = lattes_audit(13, 4, 50000);
    REQUIRE(rep.levels.size() >= 4);
    for (const auto& l : rep.levels) {
        CHECK(l.invariance_ok);
        CHECK(l.tree_audit_ok);
        CHECK(l.proportion_ok);
        CHECK(l.hasse_ok);
    }
}
