#include "doctest.h"

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "netlearn/analysis.hpp"
#include "netlearn/graph.hpp"
#include "netlearn/protocol.hpp"
#include "netlearn/rng.hpp"

using namespace netlearn;

TEST_CASE("stepsize schedule") {
    CHECK(stepsize(StepsizeSchedule(0.5, 1.0), 3) == doctest::Approx(0.5));
    CHECK(stepsize(StepsizeSchedule(0.75, 0.0), 16) == doctest::Approx(0.5));
    CHECK(stepsize(StepsizeSchedule(0.9, 1.0), 1) == doctest::Approx(std::pow(2.0, -0.1)));
    CHECK(stepsize(StepsizeSchedule(0.75, 0.0), 1) == doctest::Approx(1.0)); // the t^(1/4) start
    CHECK_THROWS_AS(StepsizeSchedule(1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepsizeSchedule(0.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(stepsize(StepsizeSchedule(0.5, 0.0), 0), std::invalid_argument);

    // nonincreasing, always in (0,1]
    const StepsizeSchedule s(0.25, 0.0);
    double prev = 1.0;
    for (std::int64_t t = 1; t < 2000; t += 7) {
        const double d = stepsize(s, t);
        CHECK(d > 0.0);
        CHECK(d <= prev + 1e-15);
        prev = d;
    }
}

TEST_CASE("noise model moments") {
    const int draws = 100000;
    for (auto dist : {NoiseDistribution::gaussian, NoiseDistribution::uniform,
                      NoiseDistribution::rademacher}) {
        NoiseModel nm(0.0, 0.7, dist, 555);
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < draws; ++i) {
            double w;
            nm.fill_offset(&w, 1);
            sum += w;
            sum_sq += w * w;
        }
        const double mean = sum / draws;
        const double var = sum_sq / draws - mean * mean;
        CHECK(std::fabs(mean) < 3.0 * 0.7 / std::sqrt(static_cast<double>(draws)));
        CHECK(var == doctest::Approx(0.49).epsilon(0.05)); // within 5%
    }
}

TEST_CASE("observe_offset") {
    Matrix v(2, 1);
    v(0, 0) = 1.0;
    v(1, 0) = 3.5;
    const ProtocolState st(v, 1);
    SUBCASE("noiseless is the exact offset") {
        NoiseModel nm(1.0, 0.0, NoiseDistribution::gaussian, 1);
        const Vec o = observe_offset(st, 0, 1, nm);
        CHECK(o[0] == doctest::Approx(2.5));
    }
    SUBCASE("zero-mean noise around the offset") {
        NoiseModel nm(0.0, 1.0, NoiseDistribution::gaussian, 2);
        double sum = 0.0;
        const int k = 100000;
        for (int i = 0; i < k; ++i) sum += observe_offset(st, 0, 1, nm)[0] - 2.5;
        CHECK(std::fabs(sum / k) < 3.0 / std::sqrt(static_cast<double>(k)));
    }
    SUBCASE("bad pair") {
        NoiseModel nm(0.0, 0.0, NoiseDistribution::gaussian, 3);
        CHECK_THROWS_AS(observe_offset(st, 0, 0, nm), std::invalid_argument);
        CHECK_THROWS_AS(observe_offset(st, 0, 5, nm), std::invalid_argument);
    }
}

TEST_CASE("step: hand-checked two-node case") {
    // v = (0, 2), no measuring, no noise, delta = 1/2:
    // v0 <- 0 + (1/8)(2) = 1/4, v1 <- 2 + (1/8)(-2) = 7/4
    const auto g = build_graph(2, {{0, 1}});
    Matrix v(2, 1);
    v(1, 0) = 2.0;
    const ProtocolState st(v, 1);
    const NoiseDraws no_noise;
    const auto next = step_with_draws(st, g, {}, 0.5, no_noise, {1.0});
    CHECK(next.v(0, 0) == doctest::Approx(0.25));
    CHECK(next.v(1, 0) == doctest::Approx(1.75));
    CHECK(next.t == 2);
}

TEST_CASE("step: fixed point and isolated nodes") {
    Rng rng(999);
    SUBCASE("everyone at the target stays put under zero noise") {
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + rng.uniform_int(7);
            const auto g = random_connected_graph(n, rng.uniform_int(6), rng);
            std::vector<int> meas;
            for (int i = 0; i < n; ++i)
                if (rng.uniform01() < 0.5) meas.push_back(i);
            const Vec mu{1.25, -0.5};
            Matrix v(n, 2);
            for (int i = 0; i < n; ++i) {
                v(i, 0) = mu[0];
                v(i, 1) = mu[1];
            }
            const auto next = step_with_draws(ProtocolState(v, 1), g, meas, 0.7, NoiseDraws{}, mu);
            for (int i = 0; i < n; ++i) {
                CHECK(next.v(i, 0) == doctest::Approx(mu[0]));
                CHECK(next.v(i, 1) == doctest::Approx(mu[1]));
            }
        }
    }
    SUBCASE("isolated non-measuring node never moves") {
        const GraphSnapshot g(3, {{0, 1}}); // node 2 isolated
        Matrix v(3, 1);
        v(0, 0) = 1.0;
        v(2, 0) = 9.0;
        const auto next = step_with_draws(ProtocolState(v, 1), g, {}, 0.9, NoiseDraws{}, {0.0});
        CHECK(next.v(2, 0) == 9.0);
    }
}

TEST_CASE("step rejects out-of-range stepsize unless explicitly allowed") {
    const auto g = build_graph(2, {{0, 1}});
    const ProtocolState st(Matrix(2, 1), 1);
    CHECK_THROWS_AS(step_with_draws(st, g, {}, 1.0, NoiseDraws{}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(step_with_draws(st, g, {}, 0.0, NoiseDraws{}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(step_with_draws(st, g, {}, 1.2, NoiseDraws{}, {0.0}, true),
                    std::invalid_argument);
    CHECK_NOTHROW(step_with_draws(st, g, {}, 1.0, NoiseDraws{}, {0.0}, true));
}

TEST_CASE("matrix form reproduces the hand-checked case and the fixed point") {
    const auto g = build_graph(2, {{0, 1}});
    Matrix v(2, 1);
    v(1, 0) = 2.0;
    const auto next = step_matrix_form(ProtocolState(v, 1), g, {}, 0.5, NoiseDraws{}, {1.0});
    CHECK(next.v(0, 0) == doctest::Approx(0.25));
    CHECK(next.v(1, 0) == doctest::Approx(1.75));

    Matrix at_mu(2, 1);
    at_mu(0, 0) = at_mu(1, 0) = 3.0;
    const auto fixed =
        step_matrix_form(ProtocolState(at_mu, 1), g, {0, 1}, 0.5, NoiseDraws{}, {3.0});
    CHECK(fixed.v(0, 0) == doctest::Approx(3.0));
    CHECK(fixed.v(1, 0) == doctest::Approx(3.0));
}

TEST_CASE("separability: a 2-dimensional run equals two matched scalar runs") {
    Rng rng(404);
    const int n = 5;
    const auto g = random_connected_graph(n, 3, rng);
    const std::vector<int> meas{1, 3};
    const Vec mu{0.7, -1.1};
    Matrix v(n, 2);
    for (auto& x : v.a) x = -2.0 + 4.0 * rng.uniform01();

    NoiseModel noise(0.8, 0.6, NoiseDistribution::gaussian, 1234);
    ProtocolState joint(v, 1);

    // scalar copies share the joint run's draws, sliced per coordinate
    Matrix v0(n, 1), v1(n, 1);
    for (int i = 0; i < n; ++i) {
        v0(i, 0) = v(i, 0);
        v1(i, 0) = v(i, 1);
    }
    ProtocolState s0(v0, 1), s1(v1, 1);

    for (int stepi = 0; stepi < 25; ++stepi) {
        const double delta = stepsize(StepsizeSchedule(0.5, 1.0), joint.t);
        const NoiseDraws draws = draw_noise(g, meas, noise, 2);
        NoiseDraws d0, d1;
        d0.has_offset = d1.has_offset = draws.has_offset;
        d0.has_measurement = d1.has_measurement = draws.has_measurement;
        if (draws.has_offset) {
            d0.offset.resize(n);
            d1.offset.resize(n);
            for (int i = 0; i < n; ++i) {
                d0.offset[i].resize(draws.offset[i].size());
                d1.offset[i].resize(draws.offset[i].size());
                for (std::size_t k = 0; k < draws.offset[i].size(); ++k) {
                    d0.offset[i][k] = {draws.offset[i][k][0]};
                    d1.offset[i][k] = {draws.offset[i][k][1]};
                }
            }
        }
        if (draws.has_measurement) {
            d0.measurement.resize(n);
            d1.measurement.resize(n);
            for (int i = 0; i < n; ++i) {
                if (draws.measurement[i].empty()) continue;
                d0.measurement[i] = {draws.measurement[i][0]};
                d1.measurement[i] = {draws.measurement[i][1]};
            }
        }
        joint = step_with_draws(joint, g, meas, delta, draws, mu);
        s0 = step_with_draws(s0, g, meas, delta, d0, {mu[0]});
        s1 = step_with_draws(s1, g, meas, delta, d1, {mu[1]});
        for (int i = 0; i < n; ++i) {
            CHECK(joint.v(i, 0) == doctest::Approx(s0.v(i, 0)).epsilon(1e-14));
            CHECK(joint.v(i, 1) == doctest::Approx(s1.v(i, 0)).epsilon(1e-14));
        }
    }
}

TEST_CASE("noiseless contraction through the averaging stage") {
    // with zero noise, the averaged iterate contracts by at least lambda_max
    Rng rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + rng.uniform_int(7);
        const auto g = random_connected_graph(n, rng.uniform_int(6), rng);
        std::vector<int> meas;
        while (meas.empty())
            for (int i = 0; i < n; ++i)
                if (rng.uniform01() < 0.4) meas.push_back(i);
        const double mu = -0.5 + rng.uniform01();
        const auto a = protocol_matrix(g, meas).m;
        const double lam = lambda_max(a);

        Vec u(static_cast<std::size_t>(n)); // v - mu
        for (auto& x : u) x = -1.0 + 2.0 * rng.uniform01();
        // y - mu = A (v - mu) when b absorbs the measuring pull toward mu
        const Vec au = matvec(a, u);
        CHECK(norm2(au) <= lam * norm2(u) + 1e-12);
        (void)mu;
    }
}

TEST_CASE("symmetric offset noise flag") {
    Rng rng(808);
    const auto g = random_connected_graph(6, 5, rng);
    NoiseModel nm(0.0, 1.0, NoiseDistribution::gaussian, 17, /*symmetric_offset=*/true);
    const NoiseDraws d = draw_noise(g, {}, nm, 2);
    REQUIRE(d.has_offset);
    for (int i = 0; i < g.n(); ++i) {
        const auto& nb = g.neighbors(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const int j = nb[k];
            const auto& nbj = g.neighbors(j);
            const std::size_t back =
                std::lower_bound(nbj.begin(), nbj.end(), i) - nbj.begin();
            for (int c = 0; c < 2; ++c)
                CHECK(d.offset[i][k][c] == doctest::Approx(-d.offset[j][back][c]));
        }
    }
}

TEST_CASE("variance and max error") {
    Matrix v(2, 1);
    v(1, 0) = 2.0;
    const ProtocolState st(v, 1);
    CHECK(variance(st, {1.0}) == doctest::Approx(2.0));
    CHECK(max_error(st, {1.0}) == doctest::Approx(1.0));

    Matrix w(1, 3);
    w(0, 0) = 1.0;
    w(0, 1) = 2.0;
    w(0, 2) = 2.0;
    CHECK(variance(ProtocolState(w, 1), {0.0, 0.0, 0.0}) == doctest::Approx(9.0));

    Matrix z(2, 1);
    z(0, 0) = 5.0;
    z(1, 0) = -3.0;
    CHECK(max_error(ProtocolState(z, 1), {0.0}) == doctest::Approx(5.0));

    Matrix at(2, 2);
    at(0, 0) = at(1, 0) = 0.5;
    at(0, 1) = at(1, 1) = -1.0;
    CHECK(variance(ProtocolState(at, 1), {0.5, -1.0}) == doctest::Approx(0.0));
    CHECK(max_error(ProtocolState(at, 1), {0.5, -1.0}) == doctest::Approx(0.0));
}

TEST_CASE("measurement schedule gaps") {
    const MeasurementSchedule every{{0}, 1};
    CHECK(every.at(1) == std::vector<int>{0});
    CHECK(every.at(2) == std::vector<int>{0});
    CHECK(every.gap_bound() == 1);

    const MeasurementSchedule sparse{{1, 2}, 4};
    CHECK(sparse.at(1) == std::vector<int>{1, 2});
    CHECK(sparse.at(2).empty());
    CHECK(sparse.at(5) == std::vector<int>{1, 2});
    CHECK(sparse.max_simultaneous() == 2);
}
