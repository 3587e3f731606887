#include "seedplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace seedplan {

namespace {

// Dense ids: 0 = server, 1..m = seeders, m+1..m+n = leechers.
struct DenseEdge {
    int from;
    int to;
};

struct TreeType {
    std::vector<DenseEdge> edges;
    int gain = 0;  // boundary slots contributed per copy, w.r.t. the subset
};

// All server-rooted trees that deliver one slot to every leecher, routing
// through any subset of seeders. Leechers are always leaves; each
// participating seeder has one parent (server or another participant) and
// at least one child (a childless relay is never useful).
std::vector<TreeType> enumerate_trees(int m, int n, const std::vector<char>& in_subset) {
    std::vector<TreeType> out;
    std::vector<int> members;
    std::vector<int> seeder_parent(m, -1);  // dense parent id
    std::vector<int> leecher_parent(n, 0);

    auto emit = [&]() {
        TreeType t;
        std::vector<int> child_count(m, 0);
        for (int s : members) {
            int par = seeder_parent[s];
            t.edges.push_back({par, 1 + s});
            if (par > 0) child_count[par - 1]++;
        }
        for (int l = 0; l < n; ++l) {
            int par = leecher_parent[l];
            t.edges.push_back({par, 1 + m + l});
            if (par > 0) child_count[par - 1]++;
        }
        for (int s : members)
            if (child_count[s] == 0) return;  // dominated: relay with no child
        for (const DenseEdge& e : t.edges) {
            bool from_in = e.from > 0 && e.from <= m && in_subset[e.from - 1];
            bool to_in = e.to > 0 && e.to <= m && in_subset[e.to - 1];
            if (from_in && !to_in) t.gain += 1;
            if (!from_in && to_in) t.gain -= 1;
        }
        out.push_back(std::move(t));
    };

    auto assign_leechers = [&](auto&& self, int l) -> void {
        if (l == n) {
            emit();
            return;
        }
        leecher_parent[l] = 0;
        self(self, l + 1);
        for (int s : members) {
            leecher_parent[l] = 1 + s;
            self(self, l + 1);
        }
    };

    // acyclic check: follow parents upward, must reach the server
    auto rooted = [&]() {
        for (int s : members) {
            int cur = s, steps = 0;
            while (seeder_parent[cur] != 0) {
                cur = seeder_parent[cur] - 1;
                if (++steps > m) return false;
            }
        }
        return true;
    };

    auto assign_parents = [&](auto&& self, size_t k) -> void {
        if (k == members.size()) {
            if (rooted()) assign_leechers(assign_leechers, 0);
            return;
        }
        int s = members[k];
        seeder_parent[s] = 0;
        self(self, k + 1);
        for (int q : members) {
            if (q == s) continue;
            seeder_parent[s] = 1 + q;
            self(self, k + 1);
        }
        seeder_parent[s] = -1;
    };

    for (int mask = 0; mask < (1 << m); ++mask) {
        members.clear();
        for (int s = 0; s < m; ++s)
            if (mask & (1 << s)) members.push_back(s);
        assign_parents(assign_parents, 0);
    }
    return out;
}

struct Search {
    explicit Search(const std::vector<TreeType>& t) : types(t) {}

    const std::vector<TreeType>& types;
    std::vector<int> order;  // type indices, best gain first
    int n_nodes = 0;
    int slot_count = 0;
    Model model = Model::perfect;

    // per-node feasibility data
    std::vector<long long> slot_cap;            // perfect/fanout: max out slots
    std::vector<long long> fanout_cap;          // fanout: max distinct targets
    BigInt c_out, c_edge, c_in, c_in_edge;      // overhead: integer cost coefficients
    std::vector<BigInt> budget_scaled;          // overhead: per-node right side
    std::vector<char> charge_receiver;          // overhead: bill a_r/b_r here

    // search state
    std::vector<std::vector<int>> pair_count;
    std::vector<long long> out_slots, in_slots;
    std::vector<long long> out_edges, in_edges;
    long long best_gain = std::numeric_limits<long long>::min();
    std::vector<int> best_counts, counts;
    unsigned long long explored = 0;

    bool node_ok(int v) const {
        if (model == Model::overhead) {
            BigInt lhs = c_out * out_slots[v] + c_edge * out_edges[v];
            if (charge_receiver[v]) lhs += c_in * in_slots[v] + c_in_edge * in_edges[v];
            return lhs <= budget_scaled[v];
        }
        if (out_slots[v] > slot_cap[v]) return false;
        if (model == Model::fanout && out_edges[v] > fanout_cap[v]) return false;
        return true;
    }

    // applies delta copies of type t; returns false (and rolls back) if a
    // touched node goes over budget
    bool apply(int t, int delta) {
        for (const DenseEdge& e : types[t].edges) {
            int prev = pair_count[e.from][e.to];
            pair_count[e.from][e.to] = prev + delta;
            out_slots[e.from] += delta;
            in_slots[e.to] += delta;
            if (prev == 0 && delta > 0) {
                out_edges[e.from]++;
                in_edges[e.to]++;
            } else if (prev + delta == 0 && delta < 0) {
                out_edges[e.from]--;
                in_edges[e.to]--;
            }
        }
        if (delta > 0) {
            for (const DenseEdge& e : types[t].edges) {
                if (!node_ok(e.from) || !node_ok(e.to)) {
                    apply(t, -delta);
                    return false;
                }
            }
        }
        return true;
    }

    void dfs(size_t pos, int slots_left, long long gain) {
        ++explored;
        if (slots_left == 0) {
            if (gain > best_gain) {
                best_gain = gain;
                best_counts = counts;
            }
            return;
        }
        if (pos == order.size()) return;
        int t = order[pos];
        long long g = types[t].gain;
        if (gain + static_cast<long long>(slots_left) * g <= best_gain) return;

        int max_use = 0;
        while (max_use < slots_left && apply(t, 1)) ++max_use;
        for (int used = max_use; used >= 0; --used) {
            counts[t] = used;
            dfs(pos + 1, slots_left - used, gain + g * used);
            if (used > 0) apply(t, -1);
        }
        counts[t] = 0;
    }
};

// floor(x) for a non-negative exact ratio, clamped to a long long
long long floor_clamped(const ExactRatio& x) {
    BigInt q = x.numerator() / x.denominator();
    if (q > BigInt(std::numeric_limits<long long>::max() / 2))
        return std::numeric_limits<long long>::max() / 2;
    return q.convert_to<long long>();
}

}  // namespace

OracleResult oracle_optimal(const StreamParams& p, const Population& pop,
                            const std::vector<int>& subset_in, int slot_count, Model model) {
    p.check();
    pop.check();
    const int m = static_cast<int>(pop.seeders.size());
    const int n = pop.n_leechers;
    if (1 + m + n > 7)
        throw Error(Errc::size_limit, "exhaustive search handles at most 7 nodes");
    if (slot_count < 1 || slot_count > 12)
        throw Error(Errc::size_limit, "exhaustive search handles at most 12 slots");
    if (n < 1) throw Error(Errc::usage, "need at least one leecher");
    std::vector<int> subset = resolve_subset(pop, subset_in);
    double upload = pop.subset_upload(subset);
    if (!(upload > 0.0))
        throw Error(Errc::zero_upload, "subset has zero total upload");

    std::vector<char> in_subset(m, 0);
    for (int i : subset) in_subset[i] = 1;
    std::vector<TreeType> types = enumerate_trees(m, n, in_subset);

    Search s(types);
    s.n_nodes = 1 + m + n;
    s.slot_count = slot_count;
    s.model = model;
    s.order.resize(types.size());
    std::iota(s.order.begin(), s.order.end(), 0);
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](int a, int b) { return types[a].gain > types[b].gain; });

    const ExactRatio er = ExactRatio::from_double(p.r);
    const ExactRatio K(slot_count);
    auto node_budget = [&](int v) -> ExactRatio {
        if (v == 0) {
            ExactRatio copies = ExactRatio::from_double(pop.n_server_copies);
            if (model != Model::overhead) return copies * er;
            ExactRatio R = (ExactRatio(1) + ExactRatio::from_double(p.a)) * er +
                           ExactRatio::from_double(p.b);
            return copies * R;
        }
        if (v <= m) return ExactRatio::from_double(pop.seeders[v - 1].upload);
        return ExactRatio(0);
    };

    if (model == Model::overhead) {
        // scale the per-node inequality
        //   (1+a)(r/K) out + b edges + a_r (r/K) in + b_r in_edges <= U
        // by K and a common power-of-two denominator to stay in integers
        ExactRatio one(1);
        std::vector<ExactRatio> vals = {
            (one + ExactRatio::from_double(p.a)) * er,
            ExactRatio::from_double(p.b) * K,
            ExactRatio::from_double(p.a_r) * er,
            ExactRatio::from_double(p.b_r) * K,
        };
        for (int v = 0; v < s.n_nodes; ++v) vals.push_back(node_budget(v) * K);
        BigInt den(1);
        for (const ExactRatio& x : vals) den = std::max(den, x.denominator());
        auto scaled = [&](const ExactRatio& x) { return x.numerator() * (den / x.denominator()); };
        s.c_out = scaled(vals[0]);
        s.c_edge = scaled(vals[1]);
        s.c_in = scaled(vals[2]);
        s.c_in_edge = scaled(vals[3]);
        s.budget_scaled.resize(s.n_nodes);
        s.charge_receiver.assign(s.n_nodes, 0);
        for (int v = 0; v < s.n_nodes; ++v) {
            s.budget_scaled[v] = scaled(vals[4 + v]);
            s.charge_receiver[v] = v >= 1 && v <= m;
        }
    } else {
        s.slot_cap.resize(s.n_nodes);
        s.fanout_cap.assign(s.n_nodes, std::numeric_limits<long long>::max());
        for (int v = 0; v < s.n_nodes; ++v) {
            s.slot_cap[v] = floor_clamped(node_budget(v) * K / er);
            if (v >= 1 && v <= m && pop.seeders[v - 1].fanout_cap)
                s.fanout_cap[v] = *pop.seeders[v - 1].fanout_cap;
        }
    }

    s.pair_count.assign(s.n_nodes, std::vector<int>(s.n_nodes, 0));
    s.out_slots.assign(s.n_nodes, 0);
    s.in_slots.assign(s.n_nodes, 0);
    s.out_edges.assign(s.n_nodes, 0);
    s.in_edges.assign(s.n_nodes, 0);
    s.counts.assign(types.size(), 0);

    s.dfs(0, slot_count, 0);
    if (s.best_gain == std::numeric_limits<long long>::min())
        throw Error(Errc::no_solution, "no valid scheme: server capacity too small");

    OracleResult res;
    res.gain_slots = s.best_gain;
    res.slot_count = slot_count;
    res.explored = s.explored;
    ExactRatio eU = ExactRatio(0);
    for (int i : subset) eU += ExactRatio::from_double(pop.seeders[i].upload);
    res.eta = ExactRatio(s.best_gain) * er / (K * eU);

    auto to_id = [&](int v) {
        if (v == 0) return NodeId::srv();
        if (v <= m) return NodeId::seeder(v - 1);
        return NodeId::leecher(v - 1 - m);
    };
    std::map<std::pair<int, int>, std::vector<int>> slots;
    int cursor = 0;
    for (size_t t = 0; t < types.size(); ++t) {
        for (int c = 0; c < s.best_counts[t]; ++c) {
            for (const DenseEdge& e : types[t].edges)
                slots[{e.from, e.to}].push_back(cursor);
            ++cursor;
        }
    }
    res.witness.slot_count = slot_count;
    for (auto& [key, sl] : slots)
        res.witness.edges.push_back({to_id(key.first), to_id(key.second), std::move(sl)});
    return res;
}

OracleResult oracle_single_fanout(double u, long long c, double r, int n_leechers,
                                  int slot_count) {
    StreamParams p;
    p.r = r;
    p.a = 0.0;
    p.b = 0.0;
    Population pop;
    pop.n_server_copies = static_cast<double>(n_leechers) + 1.0;
    pop.n_leechers = n_leechers;
    pop.seeders.push_back({u, c});
    return oracle_optimal(p, pop, {0}, slot_count, Model::fanout);
}

}  // namespace seedplan
