#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>

#include "ipdsaw/errors.hpp"
#include "ipdsaw/polymer.hpp"
#include "ipdsaw/rng.hpp"

using namespace ipdsaw;

namespace {

// Pairwise wedge sum written out independently of the library.
double brute_energy(const std::vector<Int>& l, double beta) {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < l.size(); ++i) {
        const Int a = l[i], b = l[i + 1];
        if ((a > 0 && b < 0) || (a < 0 && b > 0)) h += static_cast<double>(std::min(std::llabs(a), std::llabs(b)));
    }
    return beta * h;
}

PolymerPath random_path(RngStream& rng, Int max_n) {
    const auto n = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(max_n)));
    std::vector<Int> l(n);
    for (auto& v : l) v = static_cast<Int>(rng.below(9)) - 4;
    return PolymerPath(l);
}

}  // namespace

TEST_CASE("wedge") {
    CHECK(wedge(2, -3) == 2);
    CHECK(wedge(2, 3) == 0);
    CHECK(wedge(0, 5) == 0);
    for (Int a = -6; a <= 6; ++a)
        for (Int b = -6; b <= 6; ++b) CHECK(2 * wedge(a, b) == std::llabs(a) + std::llabs(b) - std::llabs(a + b));
}

TEST_CASE("path validation") {
    CHECK(PolymerPath({2, -3}).total_length() == 7);
    CHECK_THROWS_AS(PolymerPath(std::vector<Int>{}), DomainError);
    CHECK_THROWS_AS(PolymerPath({2, -3}, 6), DomainError);
    CHECK_NOTHROW(PolymerPath({0}, 1));
}

TEST_CASE("hamiltonian examples") {
    const double beta = 1.7;
    CHECK(hamiltonian(PolymerPath({2, -3}), beta) == doctest::Approx(2 * beta));
    CHECK(hamiltonian(PolymerPath({1, 0, -1}), beta) == 0.0);
    CHECK(hamiltonian(PolymerPath({3, -2, 2, -1}), beta) == doctest::Approx(5 * beta));
}

TEST_CASE("hamiltonian forms agree on every path up to L = 12") {
    for (Int L = 1; L <= 12; ++L)
        for_each_path(L, [&](const PolymerPath& p) {
            const double a = hamiltonian(p, 0.9);
            REQUIRE(a == doctest::Approx(hamiltonian_ls(p, 0.9)).epsilon(1e-12));
            REQUIRE(a == doctest::Approx(brute_energy(p.stretches(), 0.9)).epsilon(1e-12));
        });
}

TEST_CASE("walk transform") {
    SUBCASE("alternating sign map") {
        const auto w = to_aux_walk(PolymerPath({2, -3, 1, 4}));
        CHECK(w.values[1] == 2);
        CHECK(w.values[2] == 3);
        CHECK(w.values[3] == 1);
        CHECK(w.values[4] == -4);
        CHECK(w.values[5] == 0);
        CHECK(w.horizon == 4);
    }
    SUBCASE("all zero") {
        const auto w = to_aux_walk(PolymerPath({0, 0, 0}));
        for (Int v : w.values) CHECK(v == 0);
    }
    SUBCASE("malformed walk") {
        CHECK_THROWS_AS(AuxWalk::from_values({1, 2, 0}, 1), DomainError);
    }
    SUBCASE("round trip and areas for L <= 12") {
        for (Int L = 1; L <= 12; ++L)
            for_each_path(L, [&](const PolymerPath& p) {
                const auto w = to_aux_walk(p);
                REQUIRE(from_aux_walk(w, p.size()) == p);
                REQUIRE(w.geo_area == L - static_cast<Int>(p.size()));
                REQUIRE(w.geo_area >= std::llabs(w.alg_area));
            });
    }
}

TEST_CASE("geometry") {
    SUBCASE("two stretches") {
        const auto g = geometry(PolymerPath({2, -3}));
        CHECK(g.upper == std::vector<Int>{0, 2, 2, -1});
        CHECK(g.lower == std::vector<Int>{0, 0, -1, -1});
        CHECK(g.middle(0) == 0.0);
        CHECK(g.middle(1) == 1.0);
        CHECK(g.middle(2) == 0.5);
        CHECK(g.middle(3) == -1.0);
    }
    SUBCASE("single stretch") {
        const Int k = 5;
        const auto g = geometry(PolymerPath({k}));
        CHECK(g.upper == std::vector<Int>{0, k, k});
        CHECK(g.lower == std::vector<Int>{0, 0, k});
    }
    SUBCASE("envelope identities on random paths") {
        RngStream rng(11, 0);
        for (int t = 0; t < 10000; ++t) {
            const auto p = random_path(rng, 12);
            const auto g = geometry(p);
            Int total = 0;
            for (Int l : p.stretches()) total += l;
            for (std::size_t i = 0; i < g.upper.size(); ++i) {
                REQUIRE(g.upper[i] >= g.lower[i]);
                REQUIRE(g.upper[i] - g.lower[i] == g.profile[i]);
                REQUIRE(2 * g.upper[i] == g.middle2[i] + g.profile[i]);
                REQUIRE(2 * g.lower[i] == g.middle2[i] - g.profile[i]);
            }
            REQUIRE(g.upper.back() == total);
            REQUIRE(g.lower.back() == total);
        }
    }
}

TEST_CASE("pattern decomposition") {
    SUBCASE("two patterns") {
        const auto d = decompose_patterns(PolymerPath({1, 0, -2, 0}));
        REQUIRE(d.patterns.size() == 2);
        CHECK_FALSE(d.trailing_remainder);
        CHECK(d.patterns[0].length == 3);
        CHECK(d.patterns[0].extension == 2);
        CHECK(d.patterns[0].displacement == 1);
        // the second pattern (-2, 0) has length 2 + |-2| = 4
        CHECK(d.patterns[1].length == 4);
        CHECK(d.patterns[1].extension == 2);
        CHECK(d.patterns[1].displacement == -2);
    }
    SUBCASE("zeros only") {
        const auto d = decompose_patterns(PolymerPath({0, 0, 0}));
        REQUIRE(d.patterns.size() == 3);
        for (const auto& p : d.patterns) {
            CHECK(p.length == 1);
            CHECK(p.extension == 1);
            CHECK(p.displacement == 0);
        }
    }
    SUBCASE("remainder") {
        const auto d = decompose_patterns(PolymerPath({0, 3, -1}));
        CHECK(d.patterns.size() == 1);
        CHECK(d.trailing_remainder);
        CHECK(d.remainder.extension == 2);
        CHECK(d.remainder.length == 6);
    }
    SUBCASE("additivity over enumerated paths") {
        for (Int L = 1; L <= 12; ++L)
            for_each_path(L, [&](const PolymerPath& p) {
                const auto d = decompose_patterns(p);
                double h = 0.0;
                Int total = 0;
                for (const auto& piece : d.patterns) {
                    REQUIRE(piece.extension >= 1);
                    REQUIRE(piece.extension <= piece.length);
                    h += hamiltonian(slice(p, piece), 1.3);
                    total += piece.length;
                }
                if (d.trailing_remainder) {
                    h += hamiltonian(slice(p, d.remainder), 1.3);
                    total += d.remainder.length;
                } else {
                    REQUIRE(p.stretches().back() == 0);
                }
                REQUIRE(total == L);
                REQUIRE(h == doctest::Approx(hamiltonian(p, 1.3)).epsilon(1e-12));
            });
    }
}

TEST_CASE("beads") {
    CHECK(decompose_beads(PolymerPath({2, -3, 4, -1})) == std::vector<IndexRange>{{0, 4}});
    CHECK(decompose_beads(PolymerPath({2, 3})) == std::vector<IndexRange>{{0, 1}, {1, 2}});
    CHECK(decompose_beads(PolymerPath({2, -1, 0, 4})) == std::vector<IndexRange>{{0, 2}, {3, 4}});
    CHECK(decompose_beads(PolymerPath({0, 0})).empty());
}

TEST_CASE("enumeration") {
    CHECK(enumerate_Z(1, 2.0).z == doctest::Approx(1.0));
    for (double beta : {0.3, 1.0, 2.5}) {
        CHECK(enumerate_Z(2, beta).z == doctest::Approx(3.0));
        CHECK(enumerate_Z(4, beta).z == doctest::Approx(15.0 + 2.0 * std::exp(beta)));
    }
    // number of configurations of length L: sum_N sum over signed compositions
    std::map<Int, std::size_t> counts;
    for (Int L = 1; L <= 8; ++L) counts[L] = enumerate_Z(L, 1.0).configs.size();
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 3);
    CHECK(counts[3] == 7);
    const auto e = enumerate_Z(9, 1.1);
    double total = 0.0;
    for (const auto& w : e.configs) total += w.prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(enumerate_Z(kEnumerationLimit + 1, 1.0), DomainError);
}

TEST_CASE("path json") {
    const PolymerPath p({3, -1, 0, 2});
    const auto line = path_to_json(p);
    CHECK(line == "[3,-1,0,2]");
    CHECK(path_from_json(line) == p);
    CHECK(path_from_json(line, 10) == p);
    CHECK_THROWS(path_from_json(line, 9));
    CHECK(path_from_json(R"({"L":10,"trials":4,"stretches":[3,-1,0,2]})") == p);
    CHECK_THROWS(path_from_json("[1,"));
}
