#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "netlearn/analysis.hpp"
#include "netlearn/graph.hpp"
#include "netlearn/rng.hpp"
#include "oracles.hpp"

using namespace netlearn;

TEST_CASE("lazy walk transition matrices") {
    SUBCASE("K2") {
        const auto p = lazy_metropolis_transition(build_graph(2, {{0, 1}})).m;
        CHECK(p(0, 0) == doctest::Approx(0.75));
        CHECK(p(0, 1) == doctest::Approx(0.25));
    }
    SUBCASE("line of 3") {
        const auto p = lazy_metropolis_transition(generate(GraphFamily::line, 3)).m;
        CHECK(p(0, 1) == doctest::Approx(0.125));
        CHECK(p(1, 2) == doctest::Approx(0.125));
        CHECK(p(0, 0) == doctest::Approx(0.875));
        CHECK(p(1, 1) == doctest::Approx(0.75));
        CHECK(p(2, 2) == doctest::Approx(0.875));
    }
    SUBCASE("K3") {
        const auto p = lazy_metropolis_transition(generate(GraphFamily::complete, 3)).m;
        CHECK(p(0, 1) == doctest::Approx(0.125));
        CHECK(p(0, 0) == doctest::Approx(0.75));
    }
    SUBCASE("matches the empty-measuring update matrix") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const auto g = random_connected_graph(2 + rng.uniform_int(7), rng.uniform_int(8), rng);
            const auto a = lazy_metropolis_transition(g).m;
            const auto b = protocol_matrix(g, {}).m;
            for (int i = 0; i < g.n(); ++i)
                for (int j = 0; j < g.n(); ++j) CHECK(a(i, j) == doctest::Approx(b(i, j)));
        }
    }
}

TEST_CASE("hitting times: exact small cases") {
    SUBCASE("K2 is geometric with success 1/4") {
        const auto h = hitting_times(build_graph(2, {{0, 1}}));
        CHECK(h.h(0, 1) == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(h.h(1, 0) == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(h.max_value == doctest::Approx(4.0).epsilon(1e-9));
    }
    SUBCASE("line of 3") {
        const auto h = hitting_times(generate(GraphFamily::line, 3));
        CHECK(h.h(0, 2) == doctest::Approx(24.0).epsilon(1e-9));
        CHECK(h.h(1, 2) == doctest::Approx(16.0).epsilon(1e-9));
        CHECK(h.max_value == doctest::Approx(24.0).epsilon(1e-9));
        CHECK(h.h(1, 1) == 0.0);
    }
    SUBCASE("disconnected input throws") {
        CHECK_THROWS_AS(hitting_times(GraphSnapshot(3, {{0, 1}})), std::invalid_argument);
    }
}

TEST_CASE("hitting times agree with a walk-simulation oracle") {
    Rng rng(2024);
    SUBCASE("line of 3, end to end, tight tolerance") {
        const auto g = generate(GraphFamily::line, 3);
        const auto est = oracles::estimate_hitting(g, 0, 2, 1000000, rng);
        CHECK(std::fabs(est.mean - 24.0) / 24.0 < 0.01); // within 1%
        CHECK(std::fabs(est.mean - 24.0) < 3.0 * est.se);
    }
    SUBCASE("random connected graph, 3 standard errors") {
        const auto g = random_connected_graph(6, 4, rng);
        const auto h = hitting_times(g);
        const int src = 0, dst = 5;
        const auto est = oracles::estimate_hitting(g, src, dst, 200000, rng);
        CHECK(std::fabs(est.mean - h.h(src, dst)) < 3.0 * est.se);
    }
}

TEST_CASE("sieve constant") {
    SUBCASE("K2 closed form") {
        const auto a = metropolis_matrix(build_graph(2, {{0, 1}}));
        const auto r = sieve_constant(a);
        CHECK(r.value == doctest::Approx((5.0 - std::sqrt(17.0)) / 2.0).epsilon(1e-12));
        const auto ru = sieve_constant(a, SieveSum::unordered);
        CHECK(ru.value == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    }
    SUBCASE("zero off-diagonals give zero") {
        Matrix eye = Matrix::identity(3);
        const auto r = sieve_constant(eye);
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("non-square input throws") {
        CHECK_THROWS_AS(sieve_constant(Matrix(2, 3)), std::invalid_argument);
    }
    SUBCASE("argmin sits at a path endpoint") {
        const auto r = sieve_constant(metropolis_matrix(generate(GraphFamily::line, 5)));
        CHECK((r.argmin_index == 0 || r.argmin_index == 4));
    }
    SUBCASE("brute-force oracle: eigensolve matches the true minimum") {
        Rng rng(77);
        for (int trial = 0; trial < 6; ++trial) {
            const int n = 2 + rng.uniform_int(3); // up to 4 for the tight check
            const auto g = random_connected_graph(n, rng.uniform_int(4), rng);
            const auto a = metropolis_matrix(g).m;
            const auto r = sieve_constant(a);
            double brute = 1e300;
            for (int m = 0; m < n; ++m)
                brute = std::min(brute, oracles::sieve_bruteforce(a, m, rng, 20000));
            CHECK(brute >= r.value - 1e-9);          // form values never undershoot the minimum
            CHECK(std::fabs(brute - r.value) < 1e-6); // refinement reaches it
        }
    }
    SUBCASE("positive for connected graphs") {
        Rng rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            const auto g = random_connected_graph(2 + rng.uniform_int(7), rng.uniform_int(6), rng);
            CHECK(sieve_constant(metropolis_matrix(g)).value > 0.0);
        }
    }
}

TEST_CASE("sieve support-graph lower bound values") {
    CHECK(sieve_lower_bound(metropolis_matrix(build_graph(2, {{0, 1}})).m) ==
          doctest::Approx(0.5));
    CHECK(sieve_lower_bound(metropolis_matrix(generate(GraphFamily::line, 3)).m) ==
          doctest::Approx(1.0 / 12.0));
    CHECK(sieve_lower_bound(metropolis_matrix(generate(GraphFamily::star, 4)).m) ==
          doctest::Approx(1.0 / 24.0));
    const auto disconnected = metropolis_matrix(GraphSnapshot(3, {{0, 1}})).m;
    CHECK_THROWS_AS(sieve_lower_bound(disconnected), std::invalid_argument);
}

TEST_CASE("lambda_max") {
    SUBCASE("doubly stochastic gives 1") {
        CHECK(lambda_max(protocol_matrix(build_graph(2, {{0, 1}}), {})) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("K2 with one measurer: closed form") {
        CHECK(lambda_max(protocol_matrix(build_graph(2, {{0, 1}}), {0})) ==
              doctest::Approx((5.0 + std::sqrt(5.0)) / 8.0).epsilon(1e-12));
    }
    SUBCASE("power-iteration oracle on random diagonally dominant matrices") {
        Rng rng(31);
        for (int trial = 0; trial < 25; ++trial) {
            const int n = 2 + rng.uniform_int(6);
            Matrix a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double x = 0.25 * rng.uniform01() / n;
                    a(i, j) = x;
                    a(j, i) = x;
                }
            for (int i = 0; i < n; ++i) {
                double off = 0.0;
                for (int j = 0; j < n; ++j)
                    if (j != i) off += a(i, j);
                a(i, i) = std::min(1.0 - off, off + 0.4 + 0.5 * rng.uniform01());
            }
            CHECK(lambda_max(a) == doctest::Approx(oracles::power_lambda_max(a)).epsilon(1e-8));
        }
    }
    SUBCASE("asymmetric input throws") {
        Matrix a(2, 2);
        a(0, 1) = 0.5;
        CHECK_THROWS_AS(lambda_max(a), std::invalid_argument);
    }
}

TEST_CASE("norm decrease identity") {
    SUBCASE("stochastic matrix fixes the ones vector") {
        const auto a = protocol_matrix(build_graph(2, {{0, 1}}), {}).m;
        const auto [lhs, rhs] = norm_decrease_identity(a, {1.0, 1.0});
        CHECK(lhs == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rhs == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("measuring K2 at (1,0)") {
        const auto a = protocol_matrix(build_graph(2, {{0, 1}}), {0}).m;
        const auto [lhs, rhs] = norm_decrease_identity(a, {1.0, 0.0});
        // |x|^2 = 1; Ax = (1/2, 1/4); |Ax|^2 = 5/16
        CHECK(lhs == doctest::Approx(1.0 - 5.0 / 16.0));
        CHECK(rhs == doctest::Approx(lhs).epsilon(1e-14));
    }
    SUBCASE("exact on random symmetric pairs") {
        Rng rng(13);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = 2 + rng.uniform_int(7);
            Matrix a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const double x = -1.0 + 2.0 * rng.uniform01();
                    a(i, j) = x;
                    a(j, i) = x;
                }
            Vec x(static_cast<std::size_t>(n));
            for (auto& v : x) v = -1.0 + 2.0 * rng.uniform01();
            const auto [lhs, rhs] = norm_decrease_identity(a, x);
            CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1e-30, norm2_sq(x)));
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(norm_decrease_identity(Matrix::identity(3), {1.0, 2.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("diameter") {
    CHECK(diameter(generate(GraphFamily::complete, 5)) == 1);
    CHECK(diameter(generate(GraphFamily::line, 6)) == 5);
    CHECK(diameter(generate(GraphFamily::star, 7)) == 2);
    CHECK_THROWS_AS(diameter(GraphSnapshot(3, {{0, 1}})), std::invalid_argument);
}

TEST_CASE("line-graph hitting times grow quadratically") {
    // Exact value for the lazy walk on a path: every move fires with
    // probability 1/8, so the end-to-end time telescopes to 4n(n-1).
    double lo = 1e300, hi = 0.0;
    for (int n : {8, 16, 32, 64}) {
        const double h = hitting_times(generate(GraphFamily::line, n)).max_value;
        CHECK(h == doctest::Approx(4.0 * n * (n - 1)).epsilon(1e-9));
        const double ratio = h / (static_cast<double>(n) * n);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(hi / lo < 3.0);
}
