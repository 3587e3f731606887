#pragma once

#include "seedplan/model.hpp"
#include "seedplan/rational.hpp"

#include <vector>

namespace seedplan {

struct OracleResult {
    ExactRatio eta;           // exact optimum of the subset's set efficiency
    long long gain_slots = 0; // slots leaving the subset minus slots entering it
    DiffusionScheme witness;  // a scheme achieving the optimum
    int slot_count = 1;
    unsigned long long explored = 0;  // search nodes visited
};

/// Exhaustive optimum of the subset's set efficiency over all valid schemes
/// at the given slot granularity. Works on small instances only (at most 7
/// nodes total, at most 12 slots). Every scheme decomposes slot by slot into
/// server-rooted diffusion trees spanning the leechers, so the search runs
/// branch-and-bound over multisets of such trees with budgets checked in
/// exact arithmetic. Deterministic: equal inputs give identical witnesses.
OracleResult oracle_optimal(const StreamParams& p, const Population& pop,
                            const std::vector<int>& subset, int slot_count, Model model);

/// Single fanout-capped seeder against n_leechers and an amply provisioned
/// server, no connection cost. Approaches (1-1/c)*min(1, rc/u) as the slot
/// count grows and matches it exactly when the optimal rates are whole slots.
OracleResult oracle_single_fanout(double u, long long c, double r, int n_leechers,
                                  int slot_count);

}  // namespace seedplan
