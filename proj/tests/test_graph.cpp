#include "doctest.h"

#include <stdexcept>

#include <set>

#include "netlearn/graph.hpp"
#include "netlearn/rng.hpp"

using namespace netlearn;

TEST_CASE("build_graph normalizes and validates") {
    const auto k2 = build_graph(2, {{0, 1}});
    CHECK(k2.n() == 2);
    CHECK(k2.degree(0) == 1);
    CHECK(k2.degree(1) == 1);

    const auto l3 = build_graph(3, {{0, 1}, {1, 2}});
    CHECK(l3.degree(0) == 1);
    CHECK(l3.degree(1) == 2);
    CHECK(l3.degree(2) == 1);

    // duplicates and reversed pairs collapse
    const auto dup = build_graph(3, {{1, 0}, {0, 1}, {2, 1}});
    CHECK(dup.edge_count() == 2);

    CHECK_THROWS_AS(build_graph(3, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(3, {{-1, 2}}), std::invalid_argument);
}

TEST_CASE("metropolis matrix on small graphs") {
    SUBCASE("K2") {
        const auto m = metropolis_matrix(build_graph(2, {{0, 1}})).m;
        CHECK(m(0, 1) == doctest::Approx(1.0));
        CHECK(m(0, 0) == doctest::Approx(0.0));
        CHECK(m(1, 0) == doctest::Approx(1.0));
    }
    SUBCASE("line of 3") {
        const auto m = metropolis_matrix(generate(GraphFamily::line, 3)).m;
        CHECK(m(0, 1) == doctest::Approx(0.5));
        CHECK(m(1, 2) == doctest::Approx(0.5));
        CHECK(m(0, 0) == doctest::Approx(0.5));
        CHECK(m(1, 1) == doctest::Approx(0.0));
        CHECK(m(2, 2) == doctest::Approx(0.5));
    }
    SUBCASE("star of 4, center 0") {
        const auto m = metropolis_matrix(generate(GraphFamily::star, 4)).m;
        for (int j = 1; j < 4; ++j) CHECK(m(0, j) == doctest::Approx(1.0 / 3.0));
        CHECK(m(0, 0) == doctest::Approx(0.0));
        CHECK(m(1, 1) == doctest::Approx(2.0 / 3.0));
    }
}

TEST_CASE("protocol matrix rows and examples") {
    const auto k2 = build_graph(2, {{0, 1}});
    SUBCASE("no measuring: doubly stochastic") {
        const auto m = protocol_matrix(k2, {}).m;
        CHECK(m(0, 0) == doctest::Approx(0.75));
        CHECK(m(0, 1) == doctest::Approx(0.25));
        CHECK(m(1, 1) == doctest::Approx(0.75));
    }
    SUBCASE("node 0 measuring loses a quarter") {
        const auto m = protocol_matrix(k2, {0}).m;
        CHECK(m(0, 0) == doctest::Approx(0.5));
        CHECK(m(0, 1) == doctest::Approx(0.25));
        CHECK(m(1, 1) == doctest::Approx(0.75));
        CHECK(m(0, 0) + m(0, 1) == doctest::Approx(0.75)); // measuring row sums to 3/4
    }
    SUBCASE("line of 3 with middle measuring") {
        const auto m = protocol_matrix(generate(GraphFamily::line, 3), {1}).m;
        CHECK(m(0, 1) == doctest::Approx(0.125));
        CHECK(m(1, 2) == doctest::Approx(0.125));
        double row0 = 0, row1 = 0, row2 = 0;
        for (int j = 0; j < 3; ++j) {
            row0 += m(0, j);
            row1 += m(1, j);
            row2 += m(2, j);
        }
        CHECK(row0 == doctest::Approx(1.0));
        CHECK(row1 == doctest::Approx(0.75));
        CHECK(row2 == doctest::Approx(1.0));
    }
    SUBCASE("measuring node out of range") {
        CHECK_THROWS_AS(protocol_matrix(k2, {5}), std::invalid_argument);
    }
}

TEST_CASE("metropolis matrix properties on random graphs") {
    Rng rng(2501);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + rng.uniform_int(7);
        const auto g = random_connected_graph(n, rng.uniform_int(2 * n), rng);
        const auto m = metropolis_matrix(g).m;
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                CHECK(m(i, j) >= 0.0);
                CHECK(m(i, j) == doctest::Approx(m(j, i)));
                row += m(i, j);
            }
            CHECK(row == doctest::Approx(1.0)); // stochastic
        }
    }
    // isolated node: no neighbors, diagonal 1
    const auto with_isolated = metropolis_matrix(GraphSnapshot(3, {{0, 1}})).m;
    CHECK(with_isolated(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("protocol matrix properties on random graphs") {
    Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + rng.uniform_int(7);
        const auto g = random_connected_graph(n, rng.uniform_int(2 * n), rng);
        std::vector<int> meas;
        for (int i = 0; i < n; ++i)
            if (rng.uniform01() < 0.3) meas.push_back(i);
        const auto a = protocol_matrix(g, meas).m;
        std::vector<char> is_meas(n, 0);
        for (int i : meas) is_meas[i] = 1;
        for (int i = 0; i < n; ++i) {
            double row = 0.0, off = 0.0;
            for (int j = 0; j < n; ++j) {
                row += a(i, j);
                if (i != j) {
                    off += a(i, j);
                    CHECK(a(i, j) == doctest::Approx(a(j, i))); // symmetric
                }
            }
            CHECK(row == doctest::Approx(is_meas[i] ? 0.75 : 1.0));
            CHECK(a(i, i) >= 0.25);       // diagonal floor
            CHECK(a(i, i) >= off - 1e-12); // diagonally dominant
        }
    }
}

TEST_CASE("generate families") {
    CHECK(generate(GraphFamily::complete, 3).edge_count() == 3);
    CHECK(generate(GraphFamily::line, 3).edge_count() == 2);
    CHECK(generate(GraphFamily::star, 5).degree(0) == 4);

    const auto lolli = generate(GraphFamily::lollipop, 6);
    CHECK(lolli.edge_count() == 3 + 3); // K3 plus path 2-3-4-5
    std::set<std::pair<int, int>> edges(lolli.edges().begin(), lolli.edges().end());
    CHECK(edges.count({0, 1}) == 1);
    CHECK(edges.count({0, 2}) == 1);
    CHECK(edges.count({1, 2}) == 1);
    CHECK(edges.count({2, 3}) == 1);
    CHECK(edges.count({3, 4}) == 1);
    CHECK(edges.count({4, 5}) == 1);
    CHECK(canonical_measuring_node(GraphFamily::lollipop, 6) == 5);

    const auto grid = generate_grid(2, 2);
    CHECK(grid.n() == 4);
    CHECK(grid.edge_count() == 4);

    CHECK_THROWS_AS(generate(GraphFamily::lollipop, 5), std::invalid_argument);
    CHECK_THROWS_AS(generate(GraphFamily::lollipop, 2), std::invalid_argument);
    CHECK_THROWS_AS(generate(GraphFamily::line, 1), std::invalid_argument);

    // deterministic
    const auto a = generate(GraphFamily::lollipop, 8);
    const auto b = generate(GraphFamily::lollipop, 8);
    CHECK(a.edges() == b.edges());
}

TEST_CASE("random_sequence windows are connected and seed-deterministic") {
    SUBCASE("B=1 forces per-step connectivity") {
        const auto seq = random_sequence(4, 1, 5, 123);
        for (std::int64_t t = 1; t <= 20; ++t) CHECK(seq.at(t).is_connected());
        CHECK(verify_b_connectivity(seq, 1, 50));
    }
    SUBCASE("B=3 window unions are connected") {
        const auto seq = random_sequence(4, 3, 5, 99);
        CHECK(verify_b_connectivity(seq, 3, 90));
        bool some_sparse = false;
        for (std::int64_t t = 1; t <= 30; ++t)
            if (!seq.at(t).is_connected()) some_sparse = true;
        CHECK(some_sparse); // edges are scattered, single slots need not connect
    }
    SUBCASE("same seed, same sequence") {
        const auto a = random_sequence(6, 2, 8, 7);
        const auto b = random_sequence(6, 2, 8, 7);
        for (std::int64_t t = 1; t <= 40; ++t) CHECK(a.at(t).edges() == b.at(t).edges());
    }
    SUBCASE("edge budget validation") {
        CHECK_THROWS_AS(random_sequence(4, 2, 2, 1), std::invalid_argument);
    }
}

TEST_CASE("verify_b_connectivity window logic") {
    const auto connected = GraphSequence::constant(generate(GraphFamily::line, 3));
    CHECK(verify_b_connectivity(connected, 1, 10));
    CHECK(verify_b_connectivity(connected, 4, 10));

    const auto edgeless = GraphSequence::constant(GraphSnapshot(3, {}));
    CHECK_FALSE(verify_b_connectivity(edgeless, 1, 10));
    CHECK_FALSE(verify_b_connectivity(edgeless, 3, 10));

    // alternating {(0,1)}, {(1,2)}: connected over pairs of steps only
    const GraphSequence alt(3, 2, [](std::int64_t t) {
        return (t % 2 == 1) ? GraphSnapshot(3, {{0, 1}}) : GraphSnapshot(3, {{1, 2}});
    });
    CHECK(verify_b_connectivity(alt, 2, 20));
    CHECK_FALSE(verify_b_connectivity(alt, 1, 20));
}

TEST_CASE("graph file round trip") {
    const auto g = generate(GraphFamily::lollipop, 8);
    const std::string path = "test_graph_roundtrip.txt";
    write_graph_file(g, path);
    const auto back = read_graph_file(path);
    CHECK(back.n() == g.n());
    CHECK(back.edges() == g.edges());
    std::remove(path.c_str());
}
