#include "doctest.h"
#include "seedplan/analytic.hpp"

#include <cmath>
#include <random>

using namespace seedplan;

namespace {

StreamParams small_overhead() { return {100.0, 0.1, 1.7, 0.0, 0.0}; }
StreamParams large_overhead() { return {100.0, 0.1, 25.0, 0.0, 0.0}; }

// reference maximization, plain scan over every feasible connection count
double brute_force_eta(const StreamParams& p, double u, long long n_leechers) {
    long long cap = n_leechers;
    if (p.b > 0.0) cap = std::min(cap, static_cast<long long>(u / p.b));
    double best = 0.0;
    for (long long c = 1; c <= cap; ++c) best = std::max(best, eta_given_u_c(p, u, c));
    return best;
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("unconstrained set optimum") {
    CHECK(eta_perfect_set(1, 100.0, 100.0) == 0.0);
    CHECK(eta_perfect_set(100, 5000.0, 100.0) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(eta_perfect_set(10, 2000.0, 100.0) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(eta_perfect_set(7, 100.0, 100.0) == doctest::Approx(1.0 - 1.0 / 7).epsilon(1e-12));
    CHECK_THROWS_AS(eta_perfect_set(0, 100.0, 100.0), Error);
    CHECK_THROWS_AS(eta_perfect_set(5, 0.0, 100.0), Error);
}

TEST_CASE("single seeder with capped fanout") {
    CHECK(eta_fanout_single(100.0, 4, 100.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(eta_fanout_single(300.0, 2, 100.0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(eta_fanout_single(100.0, 1, 100.0) == 0.0);
    // consistent with the unconstrained formula at c = N_L
    for (double u : {50.0, 100.0, 400.0, 1000.0})
        CHECK(eta_fanout_single(u, 10, 100.0) ==
              doctest::Approx(eta_perfect_set(10, u, 100.0)).epsilon(1e-12));
}

TEST_CASE("proportionally homogeneous sets") {
    // all identical: efficiency 1 - 1/c
    HomogeneousSetResult hs =
        eta_fanout_homogeneous_set({{100, 4}, {100, 4}, {100, 4}}, 10, 100.0);
    CHECK(hs.eta == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(hs.common_input_rate == doctest::Approx(25.0));
    CHECK(hs.max_set_size == 3 * 4);  // floor(9/3) * floor(100/25)

    // mixed caps with a common rate e = 25
    hs = eta_fanout_homogeneous_set({{100, 4}, {50, 2}, {75, 3}}, 9, 100.0);
    CHECK(hs.eta == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(hs.max_set_size == 8);  // floor(8/3) * 4

    // single seeder u = 2r, c = 2: bound floor(2/1) * floor(1) = 2
    hs = eta_fanout_homogeneous_set({{200, 2}}, 3, 100.0);
    CHECK(hs.eta == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hs.max_set_size == 2);

    // e > r leaves no room for even one tree
    CHECK_THROWS_AS(eta_fanout_homogeneous_set({{300, 2}}, 10, 100.0), Error);
    try {
        eta_fanout_homogeneous_set({{300, 2}}, 10, 100.0);
    } catch (const Error& e) {
        CHECK(e.code == Errc::set_too_large);
    }
    try {
        eta_fanout_homogeneous_set({{100, 4}, {60, 2}}, 10, 100.0);
    } catch (const Error& e) {
        CHECK(e.code == Errc::not_homogeneous);
    }
}

TEST_CASE("efficiency at a fixed connection count") {
    StreamParams p = small_overhead();
    CHECK(eta_given_u_c(p, 100.0, 8) == doctest::Approx(0.6872727272727273).epsilon(1e-12));
    CHECK(eta_given_u_c(p, 100.0, 1) == 0.0);
    StreamParams free_p{100.0, 0.0, 0.0, 0.0, 0.0};
    for (long long c : {2LL, 5LL, 16LL})
        CHECK(eta_given_u_c(free_p, 100.0 * c, c) ==
              doctest::Approx(1.0 - 1.0 / c).epsilon(1e-12));
}

TEST_CASE("exact linear-cost optimum") {
    StreamParams p = small_overhead();
    OverheadEfficiency res = eta_overhead_exact(p, 100.0, 1000);
    CHECK(res.eta == doctest::Approx(0.6872727272727273).epsilon(1e-12));
    CHECK(res.c_opt == 8);
    CHECK(res.regime == Regime::medium);
    CHECK(res.epsilon_bound == doctest::Approx(0.002015026197971728).epsilon(1e-9));

    res = eta_overhead_exact(large_overhead(), 100.0, 1000);
    CHECK(res.eta == doctest::Approx(0.22727272727272727).epsilon(1e-12));
    CHECK(res.c_opt == 2);

    // dead zone and overprovisioning
    CHECK(eta_overhead_exact(p, 2 * p.b, 1000).eta == 0.0);
    CHECK(eta_overhead_exact(p, 2 * p.b, 1000).regime == Regime::zero);
    double R = p.full_connection_cost();
    res = eta_overhead_exact(p, 2 * R, 2);
    CHECK(res.regime == Regime::overprovisioned);
    CHECK(res.eta == doctest::Approx(p.r / (2 * R)).epsilon(1e-12));
}

TEST_CASE("exact optimum equals a plain scan over c") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> du(0.5, 3000.0);
    for (const StreamParams& p : {small_overhead(), large_overhead()}) {
        for (int i = 0; i < 300; ++i) {
            double u = du(rng);
            long long nl = 1 + static_cast<long long>(rng() % 400);
            OverheadEfficiency res = eta_overhead_exact(p, u, nl);
            if (res.regime == Regime::overprovisioned) continue;
            CHECK(res.eta == doctest::Approx(brute_force_eta(p, u, nl)).epsilon(1e-12));
            CHECK(res.eta <= p.eta_max() + 1e-12);
        }
    }
}

TEST_CASE("chosen count is the smallest argmax") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> du(3.5, 2500.0);
    for (const StreamParams& p : {small_overhead(), large_overhead()}) {
        for (int i = 0; i < 200; ++i) {
            double u = du(rng);
            long long nl = 1 + static_cast<long long>(rng() % 400);
            OverheadEfficiency res = eta_overhead_exact(p, u, nl);
            if (res.regime != Regime::medium && res.regime != Regime::high) continue;
            long long cap = std::min(nl, static_cast<long long>(u / p.b));
            long long first = 1;
            for (long long c = 1; c <= cap; ++c)
                if (eta_given_u_c(p, u, c) == res.eta) {
                    first = c;
                    break;
                }
            CHECK(res.c_opt == first);
        }
    }
}

TEST_CASE("continuous approximation and its guarantee") {
    StreamParams p = small_overhead();
    CHECK(eta_overhead_continuous(p, 100.0) ==
          doctest::Approx(0.6874835489017217).epsilon(1e-12));
    CHECK(eta_overhead_continuous(p, 2 * p.b) == 0.0);

    // branch continuity at u = R^2/b
    double R = p.full_connection_cost();
    double u_star = R * R / p.b;
    double left = eta_overhead_continuous(p, u_star * (1 - 1e-9));
    double right = eta_overhead_continuous(p, u_star * (1 + 1e-9));
    CHECK(left == doctest::Approx(right).epsilon(1e-6));
    // at that point the two arguments of the upper-regime min() coincide
    CHECK(p.b / u_star == doctest::Approx((p.b / R) * (p.b / R)).epsilon(1e-12));
    CHECK(epsilon_bound(p, u_star * (1 + 1e-9)) ==
          doctest::Approx((p.b / R) * (p.b / R) / (1 + p.a)).epsilon(1e-6));

    // vanishing additive cost: the bound collapses and the optimum is eta_max
    StreamParams nb{100.0, 0.1, 0.0, 0.0, 0.0};
    CHECK(epsilon_bound(nb, 50.0) == 0.0);
    CHECK(eta_overhead_continuous(nb, 50.0) == doctest::Approx(nb.eta_max()).epsilon(1e-12));

    CHECK(epsilon_bound(p, 100.0) == doctest::Approx(0.002015026197971728).epsilon(1e-12));

    // guarantee on a dense grid, both settings
    for (const StreamParams& q : {small_overhead(), large_overhead()}) {
        for (double u = 2 * q.b + 0.1; u <= 2000.0; u += 0.7) {
            double gap =
                std::fabs(eta_overhead_exact(q, u, 1000000).eta - eta_overhead_continuous(q, u));
            CHECK(gap <= epsilon_bound(q, u) + 1e-12);
        }
    }
}

TEST_CASE("continuous optimum is nondecreasing in u") {
    for (const StreamParams& p : {small_overhead(), large_overhead()}) {
        double prev = 0.0;
        for (double u = 2 * p.b; u <= 3000.0; u += 1.3) {
            double v = eta_overhead_continuous(p, u);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("full-rate input penalty") {
    StreamParams p = small_overhead();
    CHECK(eta_input_r(p, 100.0) == 0.0);
    CHECK(eta_input_r(p, 0.0) == 0.0);
    double R = p.full_connection_cost();
    CHECK(eta_input_r(p, 2 * R) == doctest::Approx(0.4476275738585496).epsilon(1e-12));
    for (double u = 1.0; u < R; u += 1.1) CHECK(eta_input_r(p, u) == 0.0);
    // shaping the input can only help
    for (const StreamParams& q : {small_overhead(), large_overhead()})
        for (double u = 2 * q.b + 0.1; u <= 2000.0; u += 0.9)
            CHECK(eta_input_r(q, u) <= eta_overhead_exact(q, u, 1000000).eta + 1e-12);
}

TEST_CASE("best fanout under receiver-side charges") {
    StreamParams p = small_overhead();
    CHECK(c_opt_general(p, 100.0) == doctest::Approx(std::sqrt(100.0 / 1.7)).epsilon(1e-12));
    CHECK(c_opt_general(p, 100.0) == doctest::Approx(7.669649888473705).epsilon(1e-12));
    StreamParams g = small_overhead();
    g.a_r = 0.1;
    g.b_r = 1.7;
    CHECK(c_opt_general(g, 100.0) == doctest::Approx(7.857637157145475).epsilon(1e-12));
    CHECK_THROWS_AS(c_opt_general(g, 0.1), Error);
    try {
        c_opt_general(g, 0.1);
    } catch (const Error& e) {
        CHECK(e.code == Errc::negative_radicand);
    }
}

TEST_CASE("model reduction chain: zero costs recover the fanout formula") {
    StreamParams z{100.0, 0.0, 0.0, 0.0, 0.0};
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> du(1.0, 5000.0);
    for (int i = 0; i < 1000; ++i) {
        double u = du(rng);
        long long nl = 1 + static_cast<long long>(rng() % 300);
        double exact = eta_overhead_exact(z, u, nl).eta;
        double fan = eta_fanout_single(u, nl, z.r);
        CHECK(std::fabs(exact - fan) <= 1e-12);
    }
}

}  // TEST_SUITE
