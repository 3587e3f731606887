#include "doctest.h"
#include "seedplan/analytic.hpp"
#include "seedplan/oracle.hpp"

#include <cmath>

using namespace seedplan;

namespace {

StreamParams no_cost() { return {100.0, 0.0, 0.0, 0.0, 0.0}; }

// Two capped seeders against three leechers: the set optimum sits strictly
// below the upload-weighted mean of the individual optima.
Population joint_pop() {
    Population pop;
    pop.n_server_copies = 10;
    pop.n_leechers = 3;
    pop.seeders = {{150.0, 2}, {100.0, 3}};
    return pop;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("joint optimum of two capped seeders") {
    StreamParams p = no_cost();
    Population pop = joint_pop();
    OracleResult res = oracle_optimal(p, pop, {}, 6, Model::fanout);
    CHECK(res.eta == ExactRatio(8, 15));
    CHECK(res.eta.str() == "8/15");
    CHECK(validate_scheme(p, pop, res.witness, Model::fanout).ok);
    EfficiencyReport rep = measure_efficiency(p, pop, res.witness, {});
    CHECK(rep.set_efficiency == doctest::Approx(8.0 / 15).epsilon(1e-12));
    CHECK(rep.set_gain_slots == res.gain_slots);
}

TEST_CASE("individual optima of the same two seeders") {
    StreamParams p = no_cost();
    Population pop = joint_pop();
    OracleResult s0 = oracle_optimal(p, pop, {0}, 12, Model::fanout);
    OracleResult s1 = oracle_optimal(p, pop, {1}, 12, Model::fanout);
    CHECK(s0.eta == ExactRatio(1, 2));
    CHECK(s1.eta == ExactRatio(2, 3));
    // weighted mean of individual bests: (150*(1/2)+100*(2/3))/250 = 17/30,
    // strictly above the joint 8/15
    ExactRatio mean = (ExactRatio(150) * s0.eta + ExactRatio(100) * s1.eta) / ExactRatio(250);
    CHECK(mean == ExactRatio(17, 30));
    CHECK(ExactRatio(8, 15) < mean);
    CHECK(validate_scheme(p, pop, s0.witness, Model::fanout).ok);
    CHECK(validate_scheme(p, pop, s1.witness, Model::fanout).ok);
    // the witness leaves the other seeder idle
    EfficiencyReport rep = measure_efficiency(p, pop, s0.witness, {0});
    CHECK(rep.set_efficiency == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("single seeder approaches the fanout formula from below") {
    const double u = 130.0;
    const long long c = 3;
    const double r = 100.0;
    const int n_l = 4;
    double formula = eta_fanout_single(u, c, r);
    double prev = -1.0;
    for (int k : {2, 4, 8}) {
        OracleResult res = oracle_single_fanout(u, c, r, n_l, k);
        double val = res.eta.to_double();
        CHECK(val <= formula + 1e-15);
        CHECK(val >= formula - r / k - 1e-12);
        CHECK(val >= prev - 1e-15);
        prev = val;
    }
    // at u = 120, c = 3 the optimal rates are whole on 5 slots: exact match
    OracleResult exact = oracle_single_fanout(120.0, 3, 100.0, 4, 5);
    CHECK(exact.eta == ExactRatio(2, 3));
    CHECK(exact.eta.to_double() == doctest::Approx(eta_fanout_single(120, 3, 100)));
}

TEST_CASE("perfect model agrees with zero-cost overhead model") {
    StreamParams p = no_cost();
    Population pop;
    pop.n_server_copies = 10;
    pop.n_leechers = 3;
    pop.seeders = {{120.0, {}}};
    OracleResult a = oracle_optimal(p, pop, {}, 6, Model::perfect);
    OracleResult b = oracle_optimal(p, pop, {}, 6, Model::overhead);
    CHECK(a.eta == b.eta);
    // and both sit within one slot of the closed form
    double formula = eta_perfect_set(3, 120.0, 100.0);
    CHECK(a.eta.to_double() <= formula + 1e-15);
    CHECK(a.eta.to_double() >= formula - 100.0 / 6 - 1e-12);
}

TEST_CASE("connection cost lowers the exhaustive optimum") {
    StreamParams costly;
    costly.b = 25.0;  // heavy per-connection charge
    StreamParams free = no_cost();
    Population pop;
    pop.n_server_copies = 10;
    pop.n_leechers = 3;
    pop.seeders = {{120.0, {}}};
    OracleResult cheap = oracle_optimal(free, pop, {}, 4, Model::overhead);
    OracleResult paid = oracle_optimal(costly, pop, {}, 4, Model::overhead);
    CHECK(paid.eta < cheap.eta);
}

TEST_CASE("instance limits are enforced") {
    StreamParams p = no_cost();
    Population pop;
    pop.n_server_copies = 10;
    pop.n_leechers = 7;  // 8 nodes with the seeder
    pop.seeders = {{100.0, {}}};
    CHECK_THROWS_AS(oracle_optimal(p, pop, {}, 4, Model::perfect), Error);
    try {
        oracle_optimal(p, pop, {}, 4, Model::perfect);
    } catch (const Error& e) {
        CHECK(e.code == Errc::size_limit);
    }
    pop.n_leechers = 3;
    CHECK_THROWS_AS(oracle_optimal(p, pop, {}, 13, Model::perfect), Error);
    CHECK_THROWS_AS(oracle_optimal(p, pop, {}, 0, Model::perfect), Error);
}

TEST_CASE("search is deterministic") {
    StreamParams p = no_cost();
    Population pop = joint_pop();
    OracleResult a = oracle_optimal(p, pop, {}, 6, Model::fanout);
    OracleResult b = oracle_optimal(p, pop, {}, 6, Model::fanout);
    CHECK(a.eta == b.eta);
    CHECK(a.explored == b.explored);
    REQUIRE(a.witness.edges.size() == b.witness.edges.size());
    for (size_t i = 0; i < a.witness.edges.size(); ++i) {
        CHECK(a.witness.edges[i].from == b.witness.edges[i].from);
        CHECK(a.witness.edges[i].to == b.witness.edges[i].to);
        CHECK(a.witness.edges[i].slots == b.witness.edges[i].slots);
    }
}

}  // TEST_SUITE
