#include "seedplan/builders.hpp"

#include "seedplan/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace seedplan {

namespace {

constexpr double kRelTol = 1e-9;

long long floor_tol(double x) { return static_cast<long long>(std::floor(x + kRelTol)); }

// whole-slot count for a rate, or -1 if it is not slot-representable
long long slots_for_rate(double rate, double r, int K) {
    double x = rate * static_cast<double>(K) / r;
    double rounded = std::round(x);
    if (std::fabs(x - rounded) > kRelTol * std::max(1.0, std::fabs(x))) return -1;
    return static_cast<long long>(rounded);
}

std::vector<int> block(int begin, int count) {
    std::vector<int> out(count);
    for (int i = 0; i < count; ++i) out[i] = begin + i;
    return out;
}

}  // namespace

BroadcastPlan build_perfect_broadcast(const StreamParams& p, const Population& pop,
                                      const std::vector<int>& subset_in, int slot_count) {
    p.check();
    pop.check();
    if (slot_count < 1) throw Error(Errc::usage, "slot count must be positive");
    if (pop.n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    std::vector<int> subset = resolve_subset(pop, subset_in);

    const int K = slot_count;
    const double nl = pop.n_leechers;
    double total = pop.subset_upload(subset);

    BroadcastPlan plan;
    plan.scheme.slot_count = K;
    std::vector<char> tail_from_server(K, 1);  // slots the server still owes everyone

    int offset = 0;
    for (int s : subset) {
        double u = pop.seeders[s].upload;
        double share = total <= nl * p.r ? u / nl : p.r * u / total;
        long long k = slots_for_rate(share, p.r, K);
        if (k < 0)
            throw Error(Errc::granularity, "share of S" + std::to_string(s) +
                                               " is not a whole number of slots");
        plan.share_slots.push_back(static_cast<int>(k));
        if (k == 0) continue;
        std::vector<int> blk = block(offset, static_cast<int>(k));
        for (int sl : blk) tail_from_server[sl] = 0;
        plan.scheme.edges.push_back({NodeId::srv(), NodeId::seeder(s), blk});
        for (int l = 0; l < pop.n_leechers; ++l)
            plan.scheme.edges.push_back({NodeId::seeder(s), NodeId::leecher(l), blk});
        offset += static_cast<int>(k);
    }

    std::vector<int> tail;
    for (int sl = 0; sl < K; ++sl)
        if (tail_from_server[sl]) tail.push_back(sl);
    if (!tail.empty())
        for (int l = 0; l < pop.n_leechers; ++l)
            plan.scheme.edges.push_back({NodeId::srv(), NodeId::leecher(l), tail});

    plan.expected_set_eta =
        total > 0.0 ? eta_perfect_set(pop.n_leechers, total, p.r) : 0.0;
    return plan;
}

TreesPlan build_homogeneous_trees(const StreamParams& p, const Population& pop,
                                  const std::vector<int>& subset_in, int slot_count) {
    p.check();
    pop.check();
    if (slot_count < 1) throw Error(Errc::usage, "slot count must be positive");
    if (pop.n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    std::vector<int> subset = resolve_subset(pop, subset_in);
    if (subset.empty()) throw Error(Errc::usage, "empty seeder set");

    std::vector<std::pair<double, long long>> pairs;
    for (int s : subset) {
        if (!pop.seeders[s].fanout_cap)
            throw Error(Errc::usage, "seeder S" + std::to_string(s) + " has no connection cap");
        pairs.push_back({pop.seeders[s].upload, *pop.seeders[s].fanout_cap});
    }
    HomogeneousSetResult hs = eta_fanout_homogeneous_set(pairs, pop.n_leechers, p.r);

    const int K = slot_count;
    long long blk_slots = slots_for_rate(hs.common_input_rate, p.r, K);
    if (blk_slots < 1)
        throw Error(Errc::granularity, "common input rate is not a whole number of slots");
    int n_trees = static_cast<int>(floor_tol(p.r / hs.common_input_rate));

    long long max_c = 1;
    for (auto& [u, c] : pairs) max_c = std::max(max_c, c);
    long long per_tree = max_c > 1 ? (pop.n_leechers - 1) / (max_c - 1)
                                   : std::numeric_limits<long long>::max();

    TreesPlan plan;
    plan.scheme.slot_count = K;
    plan.block_slots = static_cast<int>(blk_slots);
    plan.n_trees = n_trees;
    plan.max_set_size = hs.max_set_size;
    plan.common_input_rate = hs.common_input_rate;
    plan.expected_set_eta = hs.eta;

    // leecher -> slots it still expects from the server
    std::vector<std::vector<char>> missing(pop.n_leechers, std::vector<char>(K, 1));

    for (size_t i = 0; i < subset.size(); ++i) {
        int tree = per_tree == std::numeric_limits<long long>::max()
                       ? 0
                       : static_cast<int>(static_cast<long long>(i) / per_tree);
        size_t pos_in_tree = per_tree == std::numeric_limits<long long>::max()
                                 ? i
                                 : i % static_cast<size_t>(per_tree);
        std::vector<int> blk = block(tree * plan.block_slots, plan.block_slots);
        NodeId me = NodeId::seeder(subset[i]);
        if (pos_in_tree == 0) {
            plan.scheme.edges.push_back({NodeId::srv(), me, blk});
        }
        // chain link to the next member of the same tree, if any
        long long children = pairs[i].second;
        bool has_next = i + 1 < subset.size() &&
                        (per_tree == std::numeric_limits<long long>::max() ||
                         static_cast<long long>(i + 1) / per_tree == tree);
        if (has_next) {
            plan.scheme.edges.push_back({me, NodeId::seeder(subset[i + 1]), blk});
            children -= 1;
        }
        static_cast<void>(pos_in_tree);
        // remaining children are leechers, assigned round robin inside the tree
        for (long long c = 0; c < children; ++c) {
            int next_leaf = -1;
            for (int l = 0; l < pop.n_leechers; ++l) {
                if (missing[l][blk[0]]) {
                    next_leaf = l;
                    break;
                }
            }
            if (next_leaf < 0)
                throw Error(Errc::set_too_large, "tree has more children than leechers");
            plan.scheme.edges.push_back({me, NodeId::leecher(next_leaf), blk});
            for (int sl : blk) missing[next_leaf][sl] = 0;
        }
    }

    for (int l = 0; l < pop.n_leechers; ++l) {
        std::vector<int> rest;
        for (int sl = 0; sl < K; ++sl)
            if (missing[l][sl]) rest.push_back(sl);
        if (!rest.empty())
            plan.scheme.edges.push_back({NodeId::srv(), NodeId::leecher(l), rest});
    }
    return plan;
}

MonoratePlan build_monorate(const StreamParams& p, const Population& pop,
                            const std::vector<int>& subset_in, int slot_count) {
    p.check();
    pop.check();
    if (slot_count < 1) throw Error(Errc::usage, "slot count must be positive");
    if (pop.n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    std::vector<int> subset = resolve_subset(pop, subset_in);
    if (subset.empty()) throw Error(Errc::usage, "empty seeder set");
    if (!(p.b > 0.0))
        throw Error(Errc::granularity, "common-rate derivation needs a positive additive cost");

    double total = pop.subset_upload(subset);
    if (!(total > 0.0)) throw Error(Errc::zero_upload, "set upload must be positive");
    double ubar = total / static_cast<double>(subset.size());
    double R = p.full_connection_cost();
    if (ubar > 2.0 * R * R / p.b * (1.0 + kRelTol))
        throw Error(Errc::precondition_ubar, "mean upload exceeds 2R^2/b");

    MonoratePlan plan;
    plan.conn_cost_raw = std::sqrt(p.b * ubar / 2.0);
    plan.input_rate_raw = (plan.conn_cost_raw - p.b) / (1.0 + p.a);

    const int K = slot_count;
    long long e_slots = floor_tol(plan.input_rate_raw * K / p.r);
    if (e_slots < 1)
        throw Error(Errc::granularity, "common rate rounds down to zero slots");
    plan.input_slots = static_cast<int>(e_slots);
    plan.input_rate = static_cast<double>(e_slots) * p.r / K;
    plan.conn_cost = (1.0 + p.a) * plan.input_rate + p.b;
    plan.n_trees = K / plan.input_slots;

    long long max_c = 0;
    double gain_rate = 0.0;
    for (int s : subset) {
        long long c = floor_tol(pop.seeders[s].upload / plan.conn_cost);
        plan.fanouts.push_back(c);
        max_c = std::max(max_c, c);
        gain_rate += static_cast<double>(c - 1) * plan.input_rate;
    }
    plan.expected_set_eta = gain_rate / total;

    long long per_tree = max_c > 1 ? (pop.n_leechers - 1) / (max_c - 1)
                                   : std::numeric_limits<long long>::max();
    long long chained = 0;
    for (long long c : plan.fanouts)
        if (c >= 1) ++chained;
    plan.max_set_size =
        per_tree == std::numeric_limits<long long>::max() || plan.n_trees == 0
            ? std::numeric_limits<long long>::max()
            : per_tree * plan.n_trees;
    if (chained > plan.max_set_size)
        throw Error(Errc::set_too_large,
                    "set of " + std::to_string(chained) + " exceeds capacity " +
                        std::to_string(plan.max_set_size));

    plan.bracket_raw_lo = std::pow(1.0 - std::sqrt(2.0 * p.b / ubar), 2) / (1.0 + p.a);
    plan.bracket_raw_hi = std::pow(1.0 - std::sqrt(p.b / ubar), 2) / (1.0 + p.a);
    plan.bracket_lo = plan.input_rate / plan.conn_cost - 2.0 * plan.input_rate / ubar;
    plan.bracket_hi = plan.input_rate / plan.conn_cost - plan.input_rate / ubar;

    plan.scheme.slot_count = K;
    std::vector<std::vector<char>> missing(pop.n_leechers, std::vector<char>(K, 1));

    // chain members with at least one output through the trees; seeders whose
    // upload affords no output still take their one input, fed by the server
    std::vector<size_t> active;
    for (size_t i = 0; i < subset.size(); ++i) {
        if (plan.fanouts[i] >= 1) active.push_back(i);
        else plan.scheme.edges.push_back(
            {NodeId::srv(), NodeId::seeder(subset[i]), block(0, plan.input_slots)});
    }

    for (size_t pos = 0; pos < active.size(); ++pos) {
        long long tree = per_tree == std::numeric_limits<long long>::max()
                             ? 0
                             : static_cast<long long>(pos) / per_tree;
        std::vector<int> blk =
            block(static_cast<int>(tree) * plan.input_slots, plan.input_slots);
        size_t i = active[pos];
        NodeId me = NodeId::seeder(subset[i]);
        bool first_in_tree = pos == 0 || (per_tree != std::numeric_limits<long long>::max() &&
                                          static_cast<long long>(pos - 1) / per_tree != tree);
        if (first_in_tree) plan.scheme.edges.push_back({NodeId::srv(), me, blk});
        long long children = plan.fanouts[i];
        bool has_next = pos + 1 < active.size() &&
                        (per_tree == std::numeric_limits<long long>::max() ||
                         static_cast<long long>(pos + 1) / per_tree == tree);
        if (has_next) {
            plan.scheme.edges.push_back({me, NodeId::seeder(subset[active[pos + 1]]), blk});
            children -= 1;
        }
        for (long long c = 0; c < children; ++c) {
            int leaf = -1;
            for (int l = 0; l < pop.n_leechers; ++l) {
                if (missing[l][blk[0]]) {
                    leaf = l;
                    break;
                }
            }
            if (leaf < 0)
                throw Error(Errc::set_too_large, "tree has more children than leechers");
            plan.scheme.edges.push_back({me, NodeId::leecher(leaf), blk});
            for (int sl : blk) missing[leaf][sl] = 0;
        }
    }

    for (int l = 0; l < pop.n_leechers; ++l) {
        std::vector<int> rest;
        for (int sl = 0; sl < K; ++sl)
            if (missing[l][sl]) rest.push_back(sl);
        if (!rest.empty())
            plan.scheme.edges.push_back({NodeId::srv(), NodeId::leecher(l), rest});
    }
    return plan;
}

LevelChoice choose_level(const StreamParams& p, double u, int k_max) {
    p.check();
    if (k_max < 0) {
        if (!(p.b > 0.0))
            throw Error(Errc::usage, "explicit depth limit required when b = 0");
        k_max = std::max(0, static_cast<int>(std::floor(std::log2(p.r / p.b))));
    }

    LevelChoice best;
    best.outputs_per_level.assign(k_max + 1, 0);
    double best_raw = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= k_max; ++k) {
        std::vector<long long> outs(k_max + 1, 0);
        double residual = u;
        double goodput = 0.0;
        int l = k;
        while (residual > p.b && l <= k_max) {
            double rate = p.r / static_cast<double>(1LL << l);
            double cost = (1.0 + p.a) * rate + p.b;
            if (residual >= cost - kRelTol * std::max(1.0, cost)) {
                outs[l] += 1;
                goodput += rate;
                residual -= cost;
            } else {
                ++l;
            }
        }
        double input = p.r / static_cast<double>(1LL << k);
        double eta = u > 0.0 ? (goodput - input) / u : 0.0;
        if (eta > best_raw) {
            best_raw = eta;
            best.level = k;
            best.outputs_per_level = std::move(outs);
            best.output_goodput = goodput;
        }
    }
    best.used = best_raw > 0.0;
    best.eta_bin = std::max(0.0, best_raw);
    if (!best.used) {
        best.outputs_per_level.assign(k_max + 1, 0);
        best.output_goodput = 0.0;
    }
    return best;
}

namespace {

struct Token {
    int depth;  // hops from the server when this copy arrives
    long long seq;
    int sender;  // subset position of the producing seeder
    bool operator>(const Token& o) const {
        return depth != o.depth ? depth > o.depth : seq > o.seq;
    }
};

struct SubstreamTree {
    std::priority_queue<Token, std::vector<Token>, std::greater<Token>> supply;
    int holders = 0;  // members plus outstanding copies, balancing load
};

}  // namespace

DichotomicPlan build_dichotomic(const StreamParams& p, const Population& pop,
                                const std::vector<int>& subset_in, int k_max,
                                int slot_multiplier) {
    p.check();
    pop.check();
    if (pop.n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    std::vector<int> subset = resolve_subset(pop, subset_in);
    if (subset.empty()) throw Error(Errc::usage, "empty seeder set");
    if (slot_multiplier < 1) throw Error(Errc::usage, "slot multiplier must be positive");
    if (k_max < 0) {
        if (!(p.b > 0.0))
            throw Error(Errc::usage, "explicit depth limit required when b = 0");
        k_max = std::max(0, static_cast<int>(std::floor(std::log2(p.r / p.b))));
    }
    if (k_max > 16) throw Error(Errc::usage, "depth limit too large");

    DichotomicPlan plan;
    plan.k_max = k_max;
    const int K = (1 << k_max) * slot_multiplier;
    plan.scheme.slot_count = K;

    double total = pop.subset_upload(subset);
    if (!(total > 0.0)) throw Error(Errc::zero_upload, "set upload must be positive");
    double R = p.full_connection_cost();
    if (total > static_cast<double>(pop.n_leechers) * R * (1.0 + kRelTol))
        throw Error(Errc::precondition_ux, "set upload exceeds N_L*R");

    double mean_num = 0.0;
    for (int s : subset) {
        LevelChoice c = choose_level(p, pop.seeders[s].upload, k_max);
        mean_num += c.eta_bin * pop.seeders[s].upload;
        plan.choices.push_back(std::move(c));
    }
    plan.weighted_mean_eta_bin = mean_num / total;
    plan.expected_eta_lower =
        plan.weighted_mean_eta_bin - p.r * static_cast<double>(k_max) / total;

    // order of placement: descending upload, ties by subset position
    std::vector<size_t> order(subset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return pop.seeders[subset[a]].upload > pop.seeders[subset[b]].upload;
    });

    // trees[l][j] follows substream j of level l (block of K/2^l slots)
    std::vector<std::vector<SubstreamTree>> trees(k_max + 1);
    for (int l = 0; l <= k_max; ++l) trees[l].resize(static_cast<size_t>(1) << l);

    const double server_budget = pop.n_server_copies * R;
    double server_used = 0.0;
    long long seq = 0;
    plan.longest_path = 0;

    // dense edge map: (from,to) -> slot set; from/to as subset position,
    // -1 for the server, -(2+l) for leecher l
    std::map<std::pair<int, int>, std::set<int>> edge_slots;
    auto add_block = [&](int from, int to, int level, long long index) {
        int width = K >> level;
        auto& slots = edge_slots[{from, to}];
        for (int s = 0; s < width; ++s)
            slots.insert(static_cast<int>(index) * width + s);
    };

    std::vector<int> depth(subset.size(), -1);
    double substream_rate[17];
    for (int l = 0; l <= k_max; ++l) substream_rate[l] = p.r / static_cast<double>(1LL << l);

    struct Placement {
        size_t who;      // order position
        int level;
        long long tree;  // substream index at that level
    };
    std::vector<Placement> placements;

    for (size_t pos : order) {
        const LevelChoice& choice = plan.choices[pos];
        if (!choice.used) continue;
        int lv = choice.level;

        // candidate trees, least loaded first
        std::vector<long long> cands(trees[lv].size());
        for (size_t j = 0; j < cands.size(); ++j) cands[j] = static_cast<long long>(j);
        std::stable_sort(cands.begin(), cands.end(), [&](long long a, long long b) {
            return trees[lv][a].holders < trees[lv][b].holders;
        });

        bool placed = false;
        for (long long j : cands) {
            SubstreamTree& tr = trees[lv][j];
            double cost = (1.0 + p.a) * substream_rate[lv] + p.b;
            if (!tr.supply.empty()) {
                Token t = tr.supply.top();
                tr.supply.pop();
                add_block(t.sender, static_cast<int>(pos), lv, j);
                depth[pos] = t.depth;
            } else if (server_used + cost <=
                       server_budget + kRelTol * std::max(1.0, server_budget)) {
                add_block(-1, static_cast<int>(pos), lv, j);
                server_used += cost;
                depth[pos] = 1;
            } else if (lv > 0 && !trees[lv - 1][j / 2].supply.empty()) {
                SubstreamTree& par = trees[lv - 1][j / 2];
                Token t = par.supply.top();
                par.supply.pop();
                add_block(t.sender, static_cast<int>(pos), lv - 1, j / 2);
                depth[pos] = t.depth;
                plan.root_waste_rate += substream_rate[lv];  // half the parent block
            } else {
                continue;
            }
            tr.holders += 1;
            placements.push_back({pos, lv, j});
            placed = true;

            // spread this seeder's outputs: same-level copies stay in tree j,
            // deeper levels follow the least-loaded child substream
            long long at = j;
            for (int l = lv; l <= k_max; ++l) {
                if (l > lv) {
                    long long left = at * 2, right = at * 2 + 1;
                    at = trees[l][right].holders < trees[l][left].holders ? right : left;
                }
                long long n = choice.outputs_per_level[l];
                for (long long c = 0; c < n; ++c) {
                    trees[l][at].supply.push({depth[pos] + 1, seq++, static_cast<int>(pos)});
                    trees[l][at].holders += 1;
                }
            }
            break;
        }
        if (!placed)
            throw Error(Errc::rooting_failed,
                        "no input available for a level-" + std::to_string(lv) + " tree");
    }

    // hand the remaining copies to leechers, shallow levels (large blocks)
    // first; a leecher accepts a block only if it overlaps nothing it has
    std::vector<std::vector<char>> have(pop.n_leechers, std::vector<char>(K, 0));
    auto accepts = [&](int l, int level, long long index) {
        int width = K >> level;
        for (int s = 0; s < width; ++s)
            if (have[l][static_cast<int>(index) * width + s]) return false;
        return true;
    };
    int cursor = 0;
    for (int l = 0; l <= k_max; ++l) {
        for (size_t j = 0; j < trees[l].size(); ++j) {
            auto& tr = trees[l][j];
            while (!tr.supply.empty()) {
                Token t = tr.supply.top();
                tr.supply.pop();
                int leech = -1;
                for (int step = 0; step < pop.n_leechers; ++step) {
                    int cand = (cursor + step) % pop.n_leechers;
                    if (accepts(cand, l, static_cast<long long>(j))) {
                        leech = cand;
                        break;
                    }
                }
                if (leech < 0) {
                    plan.curtailed_rate += substream_rate[l];
                    continue;
                }
                cursor = (leech + 1) % pop.n_leechers;
                add_block(t.sender, -2 - leech, l, static_cast<long long>(j));
                int width = K >> l;
                for (int s = 0; s < width; ++s)
                    have[leech][static_cast<int>(j) * width + s] = 1;
                plan.longest_path = std::max(plan.longest_path, t.depth);
            }
        }
    }

    // server tops up whatever is still missing
    for (int l = 0; l < pop.n_leechers; ++l) {
        std::vector<int> rest;
        for (int s = 0; s < K; ++s)
            if (!have[l][s]) rest.push_back(s);
        if (rest.empty()) continue;
        auto& slots = edge_slots[{-1, -2 - l}];
        slots.insert(rest.begin(), rest.end());
        server_used += edge_cost(p, static_cast<double>(rest.size()) * p.r / K);
        plan.longest_path = std::max(plan.longest_path, 1);
    }
    plan.server_cost = server_used;

    auto to_id = [&](int v) {
        if (v == -1) return NodeId::srv();
        if (v <= -2) return NodeId::leecher(-2 - v);
        return NodeId::seeder(subset[v]);
    };
    for (auto& [key, slots] : edge_slots)
        plan.scheme.edges.push_back(
            {to_id(key.first), to_id(key.second), std::vector<int>(slots.begin(), slots.end())});
    return plan;
}

}  // namespace seedplan
