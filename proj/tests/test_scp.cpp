#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "helpers.hpp"
#include "paircover/scp.hpp"
#include "paircover/stats.hpp"

using namespace paircover;

TEST_CASE("verify_cover on the worked instance", "[scp]") {
    const ScpInstance inst = testutil::worked_instance();
    CHECK(verify_cover(inst, {{1, 4}}));
    CHECK_FALSE(verify_cover(inst, {{1}}));
    // {f2, f3}: c1 is adjacent to f2 but not f3, c2 to f3 but not f2.
    CHECK_FALSE(verify_cover(inst, {{2, 3}}));
    CHECK_THROWS_AS(verify_cover(inst, {{5}}), InvalidArgument);
    CHECK_THROWS_AS(verify_cover(inst, {{0}}), InvalidArgument);
}

TEST_CASE("solve_exact finds the minimum pair cover", "[scp]") {
    const CoverSolution best = solve_exact(testutil::worked_instance());
    CHECK(best.chosen == std::vector<int>{1, 4});
    CHECK(best.size() == 2);

    SECTION("empty ground set needs nothing") {
        const CoverSolution empty = solve_exact(ScpInstance(0, 3, {}));
        CHECK(empty.size() == 0);
    }
    SECTION("a single element covered by one pair") {
        const CoverSolution pair = solve_exact(ScpInstance(1, 2, {{1, 1}, {2, 1}}));
        CHECK(pair.chosen == std::vector<int>{1, 2});
    }
    SECTION("ties break toward the lexicographically smallest cover") {
        const CoverSolution tie = solve_exact(ScpInstance(1, 3, {{1, 1}, {2, 1}, {3, 1}}));
        CHECK(tie.chosen == std::vector<int>{1, 2});
    }
    SECTION("infeasible when some element has no covering pair") {
        CHECK_THROWS_AS(solve_exact(ScpInstance(1, 1, {{1, 1}})), InfeasibleError);
        CHECK_THROWS_AS(solve_exact(ScpInstance(2, 2, {{1, 1}, {2, 1}, {1, 2}})), InfeasibleError);
    }
    SECTION("enumeration bound") {
        CHECK_THROWS_AS(solve_exact(ScpInstance(1, 25, {})), CapacityError);
    }
}

TEST_CASE("pair_cover_map lists covering pairs canonically", "[scp]") {
    const PairCoverMap map = pair_cover_map(testutil::worked_instance());
    const std::vector<std::pair<int, int>> c1{{1, 2}, {1, 4}, {2, 4}};
    const std::vector<std::pair<int, int>> c2{{1, 3}, {1, 4}, {3, 4}};
    CHECK(map.pairs_by_ground[0] == c1);
    CHECK(map.pairs_by_ground[1] == c2);
    CHECK(map.r(1) == 3);
    CHECK(map.r(2) == 3);
    CHECK(map.q.at({1, 4}) == std::vector<int>{1, 2});

    SECTION("edgeless graph has empty pair sets") {
        const PairCoverMap empty = pair_cover_map(ScpInstance(2, 3, {}));
        CHECK(empty.r(1) == 0);
        CHECK(empty.r(2) == 0);
        CHECK(empty.q.empty());
    }
    SECTION("complete bipartite n=1, m=3") {
        const PairCoverMap full =
            pair_cover_map(ScpInstance(1, 3, {{1, 1}, {2, 1}, {3, 1}}));
        CHECK(full.r(1) == 3);
    }
}

TEST_CASE("instance invariants", "[scp]") {
    CHECK_THROWS_AS(ScpInstance(1, 1, {{1, 2}}), InvalidArgument);
    CHECK_THROWS_AS(ScpInstance(1, 1, {{2, 1}}), InvalidArgument);
    const ScpInstance dup(1, 2, {{1, 1}, {1, 1}, {2, 1}});
    CHECK(dup.edges().size() == 2); // duplicates collapse
    CHECK(dup.dummy_free());
    CHECK_FALSE(ScpInstance(1, 2, {{1, 1}}).dummy_free());
}

TEST_CASE("generator produces dummy-free instances deterministically", "[scp]") {
    CHECK_THROWS_AS(gen_random_dummy_free(0, 1, 7), InvalidArgument);
    CHECK_THROWS_AS(gen_random_dummy_free(1, 0, 7), InvalidArgument);

    SECTION("n=1 forces the unique complete graph") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ScpInstance inst = gen_random_dummy_free(1, 3, seed);
            CHECK(inst.edges().size() == 3);
        }
    }
    SECTION("same seed, same graph") {
        const ScpInstance a = gen_random_dummy_free(3, 4, 42);
        const ScpInstance b = gen_random_dummy_free(3, 4, 42);
        CHECK(a.edges() == b.edges());
    }
    SECTION("always dummy-free over many draws") {
        std::uint64_t stamp = 0;
        for (int n = 1; n <= 4; ++n) {
            for (int m = 1; m <= 4; ++m) {
                for (int draw = 0; draw < 625; ++draw) {
                    CHECK(gen_random_dummy_free(n, m, ++stamp).dummy_free());
                }
            }
        }
    }
    SECTION("n=2, m=1: all three graphs occur") {
        std::map<std::vector<std::pair<int, int>>, int> counts;
        for (std::uint64_t seed = 0; seed < 3000; ++seed) {
            counts[gen_random_dummy_free(2, 1, seed).edges()]++;
        }
        REQUIRE(counts.size() == 3);
        for (const auto& [edges, count] : counts) CHECK(count > 800);
    }
}

TEST_CASE("generator uniformity over the nine (2,2) graphs", "[scp][uniformity]") {
    // Appendix-B claim: each dummy-free graph has probability (2^n - 1)^-m.
    std::map<std::vector<std::pair<int, int>>, long long> counts;
    const long long draws = 90'000;
    for (long long draw = 0; draw < draws; ++draw) {
        counts[gen_random_dummy_free(2, 2, 1000 + static_cast<std::uint64_t>(draw)).edges()]++;
    }
    REQUIRE(counts.size() == 9);
    std::vector<long long> observed;
    for (const auto& [edges, count] : counts) observed.push_back(count);
    const std::vector<double> expected(9, static_cast<double>(draws) / 9.0);
    const double stat = chi_square_statistic(observed, expected);
    // chi-square critical value, 8 degrees of freedom, significance 0.001
    CHECK(stat < 26.1245);
}
