#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "slp/common.hpp"
#include "slp/walk_stats.hpp"
#include "test_util.hpp"

using namespace slp;

TEST_CASE("walk counts on the single edge") {
    std::vector<WalkCounts> counts = walk_counts(test::path2(), 3);
    REQUIRE(counts.size() == 3);
    CHECK(counts[0].k == 1);
    CHECK(counts[0].closed == std::vector<double>{0.0, 0.0});
    CHECK(counts[0].total_in == std::vector<double>{1.0, 1.0});
    CHECK(counts[1].closed == std::vector<double>{1.0, 1.0});
    CHECK(counts[1].total_in == std::vector<double>{1.0, 1.0});
    CHECK(counts[2].closed == std::vector<double>{0.0, 0.0});
    CHECK(counts[2].total_in == std::vector<double>{1.0, 1.0});
}

TEST_CASE("walk counts on the triangle") {
    std::vector<WalkCounts> counts = walk_counts(test::triangle(), 3);
    // A = J - I, so A^2 = J + I and A^3 = 3J - I.
    CHECK(counts[1].closed == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(counts[1].total_in == std::vector<double>{4.0, 4.0, 4.0});
    CHECK(counts[2].closed == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(counts[2].total_in == std::vector<double>{8.0, 8.0, 8.0});
}

TEST_CASE("walk counts on the triangle with self-loops") {
    Graph g = set_self_loops(test::triangle(), true);
    std::vector<WalkCounts> counts = walk_counts(g, 2);
    // With loops the adjacency is all-ones, so every power is 3^(k-1) J.
    CHECK(counts[0].closed == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(counts[0].total_in == std::vector<double>{3.0, 3.0, 3.0});
    CHECK(counts[1].closed == std::vector<double>{3.0, 3.0, 3.0});
    CHECK(counts[1].total_in == std::vector<double>{9.0, 9.0, 9.0});
}

TEST_CASE("brute-force walk counter matches hand values") {
    Graph k3 = test::triangle();
    CHECK(brute_force_walks(k3, 0, 0, 2) == 2);
    CHECK(brute_force_walks(k3, 0, 1, 2) == 1);
    CHECK(brute_force_walks(k3, 0, 1, 3) == 3);
    CHECK(brute_force_walks(k3, 0, 0, 3) == 2);
    Graph p2 = test::path2();
    CHECK(brute_force_walks(p2, 0, 1, 1) == 1);
    CHECK(brute_force_walks(p2, 0, 1, 2) == 0);
    CHECK(brute_force_walks(p2, 0, 0, 0) == 1);
    CHECK(brute_force_walks(p2, 0, 1, 0) == 0);
}

TEST_CASE("brute-force walk counter enforces its bounds") {
    CHECK_THROWS_AS(brute_force_walks(test::complete(13), 0, 0, 2),
                    ConfigError);
    CHECK_THROWS_AS(brute_force_walks(test::triangle(), 0, 0, 7), ConfigError);
    CHECK_THROWS_AS(brute_force_walks(test::triangle(), 0, 3, 2), ConfigError);
    CHECK_THROWS_AS(brute_force_walks(test::triangle(), 0, 0, -1), ConfigError);
}

TEST_CASE("matrix-power counts agree with the brute-force oracle") {
    Rng rng(RngSeed{77});
    for (int trial = 0; trial < 25; ++trial) {
        auto n = static_cast<NodeId>(2 + rng.next_below(6));
        Graph g = test::random_graph(rng, n, 0.5);
        if (rng.bernoulli(0.5)) g = set_self_loops(g, true);
        std::vector<WalkCounts> counts = walk_counts(g, 4);
        for (int k = 1; k <= 4; ++k) {
            const WalkCounts& wc = counts[static_cast<std::size_t>(k - 1)];
            for (NodeId v = 0; v < n; ++v) {
                auto vi = static_cast<std::size_t>(v);
                CHECK(wc.closed[vi] ==
                      static_cast<double>(brute_force_walks(g, v, v, k)));
                std::int64_t total = 0;
                for (NodeId u = 0; u < n; ++u)
                    total += brute_force_walks(g, u, v, k);
                CHECK(wc.total_in[vi] == static_cast<double>(total));
            }
        }
    }
}

TEST_CASE("adding loops expands length-2 counts binomially") {
    // (A + I)^2 = A^2 + 2A + I entrywise, so the diagonal gains exactly 1
    // and column sums gain 2 deg(v) + 1.
    Rng rng(RngSeed{123});
    for (int trial = 0; trial < 20; ++trial) {
        auto n = static_cast<NodeId>(2 + rng.next_below(8));
        Graph g = test::random_graph(rng, n, 0.4);
        Graph gl = set_self_loops(g, true);
        WalkCounts without = walk_counts(g, 2)[1];
        WalkCounts with = walk_counts(gl, 2)[1];
        for (NodeId v = 0; v < n; ++v) {
            auto vi = static_cast<std::size_t>(v);
            CHECK(with.closed[vi] == without.closed[vi] + 1.0);
            CHECK(with.total_in[vi] ==
                  without.total_in[vi] + 2.0 * g.degree(v) + 1.0);
        }
    }
}

TEST_CASE("proportions on the triangle, both modes") {
    std::vector<ProportionReport> without = proportions(test::triangle(), 2);
    CHECK(without[0].k == 1);
    CHECK_FALSE(without[0].self_loops);
    CHECK(without[0].mean == 0.0);  // no closed 1-walks without loops
    CHECK(without[1].per_node == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(without[1].mean == 0.5);
    CHECK(without[1].std == 0.0);

    Graph gl = set_self_loops(test::triangle(), true);
    std::vector<ProportionReport> with = proportions(gl, 2);
    CHECK(with[0].self_loops);
    CHECK(with[0].mean == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(with[1].mean == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("k=1 closed proportion is exactly zero without loops") {
    Rng rng(RngSeed{5});
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = test::random_graph_no_isolated(rng, 8, 0.3);
        std::vector<ProportionReport> reps = proportions(g, 1);
        for (double p : reps[0].per_node) CHECK(p == 0.0);
        CHECK(reps[0].mean == 0.0);
    }
}

TEST_CASE("proportions name the node with no incoming walks") {
    std::vector<std::pair<NodeId, NodeId>> pairs{{0, 1}};
    Graph g = Graph::from_edge_list(pairs, 3);  // node 2 isolated
    CHECK_THROWS_WITH_AS(proportions(g, 2),
                         doctest::Contains("node 2"), NumericError);
}

TEST_CASE("length-1 and length-2 estimates match their closed forms") {
    DegreeStats stats;
    stats.mean_degree = 2.0;
    stats.mean_sq_degree = 4.0;
    stats.mean_neighbor_degree = 2.0;
    stats.n = 3;
    CHECK(estimate_k1(stats, false) == 0.0);
    CHECK(estimate_k1(stats, true) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(estimate_k2(stats, false) == doctest::Approx(0.5).epsilon(1e-15));
    // (d+1) / (d2 + d + d2/d + 1) with d = 2, d2 = 4: 3/9.
    CHECK(estimate_k2(stats, true) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("the length-2 estimate always drops when loops are added") {
    Rng rng(RngSeed{2024});
    for (int trial = 0; trial < 200; ++trial) {
        DegreeStats stats;
        stats.mean_degree = rng.uniform(0.05, 50.0);
        // <d^2> >= <d>^2 by Jensen; sample the feasible region.
        stats.mean_sq_degree =
            stats.mean_degree * stats.mean_degree * rng.uniform(1.0, 4.0);
        stats.n = 100;
        CHECK(estimate_k2(stats, false) > estimate_k2(stats, true));
    }
}

TEST_CASE("expected total walks reduce to moments at small k") {
    DegreeStats stats = degree_stats(test::triangle());
    CHECK(expected_total_walks(stats, 1) == doctest::Approx(2.0));
    CHECK(expected_total_walks(stats, 2) == doctest::Approx(4.0));
    // Regular graph: the branching estimate is exact, A^3 columns sum to 8.
    CHECK(expected_total_walks(stats, 3) == doctest::Approx(8.0));
}

TEST_CASE("estimates are exact on regular graphs") {
    for (const Graph& g : {test::cycle(4), test::cycle(5), test::complete(4)}) {
        DegreeStats stats = degree_stats(g);
        double d = stats.mean_degree;
        std::vector<ProportionReport> without = proportions(g, 2);
        CHECK(without[1].mean == doctest::Approx(estimate_k2(stats, false))
                                     .epsilon(1e-15));
        CHECK(without[1].mean == doctest::Approx(1.0 / d).epsilon(1e-15));

        Graph gl = set_self_loops(g, true);
        std::vector<ProportionReport> with = proportions(gl, 2);
        CHECK(with[0].mean ==
              doctest::Approx(estimate_k1(stats, true)).epsilon(1e-15));
        CHECK(with[1].mean ==
              doctest::Approx(estimate_k2(stats, true)).epsilon(1e-15));
        CHECK(with[1].mean == doctest::Approx(1.0 / (d + 1.0)).epsilon(1e-15));
    }
}

TEST_CASE("walk counts refuse to pass the exact-integer limit") {
    // K12 column sums are exactly 11^k: safe at k = 15, past 2^53 at k = 16.
    Graph g = test::complete(12);
    CHECK_NOTHROW(walk_counts(g, 15));
    CHECK_THROWS_WITH_AS(walk_counts(g, 16), doctest::Contains("16"),
                         NumericError);
}

TEST_CASE("proportions are permutation invariant") {
    Rng rng(RngSeed{404});
    Graph g = test::random_graph_no_isolated(rng, 9, 0.35);
    std::vector<NodeId> perm(9);
    for (NodeId v = 0; v < 9; ++v) perm[static_cast<std::size_t>(v)] = v;
    rng.shuffle(perm);

    std::vector<std::pair<NodeId, NodeId>> relabeled;
    for (NodeId u = 0; u < 9; ++u)
        for (NodeId v : g.neighbors(u))
            if (u <= v)
                relabeled.emplace_back(perm[static_cast<std::size_t>(u)],
                                       perm[static_cast<std::size_t>(v)]);
    Graph h = Graph::from_edge_list(relabeled, 9);

    std::vector<ProportionReport> pg = proportions(g, 4);
    std::vector<ProportionReport> ph = proportions(h, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        for (NodeId v = 0; v < 9; ++v) {
            auto vi = static_cast<std::size_t>(v);
            auto pi = static_cast<std::size_t>(perm[vi]);
            // Same integer counts divide, so equality is exact.
            CHECK(pg[k].per_node[vi] == ph[k].per_node[pi]);
        }
        CHECK(pg[k].mean == doctest::Approx(ph[k].mean).epsilon(1e-12));
        CHECK(pg[k].std == doctest::Approx(ph[k].std).epsilon(1e-12));
    }
}

TEST_CASE("length-2 verdict on the triangle") {
    ParadoxVerdict v = paradox_verdict(test::triangle());
    CHECK(v.k == 2);
    CHECK(v.empirical_without == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.empirical_with == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(v.estimate_without == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.estimate_with == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(v.holds_empirically);
    CHECK(v.holds_analytically);
}

TEST_CASE("verdict requires a loop-free graph") {
    Graph gl = set_self_loops(test::triangle(), true);
    CHECK_THROWS_AS(paradox_verdict(gl), ConfigError);
}
