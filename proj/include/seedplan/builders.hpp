#pragma once

#include "seedplan/model.hpp"

#include <vector>

namespace seedplan {

struct BroadcastPlan {
    DiffusionScheme scheme;
    std::vector<int> share_slots;  // distinct slots per subset member, subset order
    double expected_set_eta = 0.0;
};

/// No-cost unlimited-fanout construction: each subset seeder receives a
/// distinct share (u_s/N_L, or r*u_s/U_X when the set is overprovisioned)
/// and broadcasts it to every leecher; the server fills the rest directly.
/// Achieves (1 - 1/N_L) * min(1, N_L*r/U_X). Throws GRANULARITY when a
/// share is not a whole number of slots.
BroadcastPlan build_perfect_broadcast(const StreamParams& p, const Population& pop,
                                      const std::vector<int>& subset, int slot_count);

struct TreesPlan {
    DiffusionScheme scheme;
    int block_slots = 0;  // slots per tree substream
    int n_trees = 0;
    long long max_set_size = 0;
    double common_input_rate = 0.0;  // e, with u_s = e * c_s
    double expected_set_eta = 0.0;
};

/// Fanout-capped construction for proportional sets (u_s = e*c_s, e <= r):
/// floor(r/e) disjoint substreams, each diffused down a chain of seeders
/// where seeder s takes exactly c_s children. Every seeder then reaches
/// efficiency 1 - 1/c_s. Throws NOT_HOMOGENEOUS, SET_TOO_LARGE, GRANULARITY.
TreesPlan build_homogeneous_trees(const StreamParams& p, const Population& pop,
                                  const std::vector<int>& subset, int slot_count);

struct MonoratePlan {
    DiffusionScheme scheme;
    double conn_cost_raw = 0.0;   // E = sqrt(b*ubar/2) before slot rounding
    double input_rate_raw = 0.0;  // e = (E-b)/(1+a) before slot rounding
    int input_slots = 0;
    double conn_cost = 0.0;   // E recomputed from the rounded e
    double input_rate = 0.0;  // e after rounding down to whole slots
    std::vector<long long> fanouts;  // floor(u_s/E), subset order
    int n_trees = 0;
    long long max_set_size = 0;
    double bracket_raw_lo = 0.0;  // (1-sqrt(2b/ubar))^2/(1+a), exclusive
    double bracket_raw_hi = 0.0;  // (1-sqrt(b/ubar))^2/(1+a), inclusive
    double bracket_lo = 0.0;      // e/E - 2e/ubar with rounded e, exclusive
    double bracket_hi = 0.0;      // e/E - e/ubar with rounded e, inclusive
    double expected_set_eta = 0.0;
};

/// Linear-cost construction where every connection carries one common rate
/// e derived from the mean upload: E = sqrt(b*ubar/2), e = (E-b)/(1+a)
/// rounded down to whole slots, per-seeder fanout floor(u_s/E). Throws
/// PRECONDITION_UBAR when ubar > 2R^2/b, SET_TOO_LARGE, GRANULARITY.
MonoratePlan build_monorate(const StreamParams& p, const Population& pop,
                            const std::vector<int>& subset, int slot_count);

struct LevelChoice {
    int level = 0;
    double eta_bin = 0.0;
    bool used = false;  // false when no level yields positive efficiency
    std::vector<long long> outputs_per_level;  // indexed by absolute level
    double output_goodput = 0.0;
};

/// Greedy halving-ladder descent for one seeder: receive a level-k
/// substream (rate r/2^k), open level-k outputs while they fit, then fall
/// through to cheaper levels down to k_max. Returns the best level and its
/// efficiency (ties to the smaller level). k_max < 0 selects the default
/// floor(log2(r/b)); an explicit k_max is required when b = 0.
LevelChoice choose_level(const StreamParams& p, double u, int k_max);

struct DichotomicPlan {
    DiffusionScheme scheme;
    int k_max = 0;
    std::vector<LevelChoice> choices;  // subset order
    double weighted_mean_eta_bin = 0.0;
    double expected_eta_lower = 0.0;  // weighted mean minus r*k_max/U_X
    double root_waste_rate = 0.0;     // input overshoot of parent-block roots
    double curtailed_rate = 0.0;      // planned outputs nobody could accept
    int longest_path = 0;             // max server-to-leecher hops
    double server_cost = 0.0;         // upload the server ends up spending
};

/// Halving-ladder construction for a whole set: each seeder operates at its
/// chosen level inside per-substream diffusion trees (join the tree with
/// the fewest holders, breadth first). New trees are fed first from an
/// existing output of that substream, then from spare server capacity, then
/// from a parent-substream leaf (half of that input is counted as waste).
/// slot_count = 2^k_max * slot_multiplier. Throws PRECONDITION_UX when
/// U_X > N_L*R and ROOTING_FAILED when some tree cannot be fed.
DichotomicPlan build_dichotomic(const StreamParams& p, const Population& pop,
                                const std::vector<int>& subset, int k_max,
                                int slot_multiplier = 1);

}  // namespace seedplan
