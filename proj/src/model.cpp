#include "seedplan/model.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <set>

namespace seedplan {

namespace {

constexpr double kRelTol = 1e-9;

bool within_budget(double used, double budget) {
    return used <= budget + kRelTol * std::max(1.0, std::fabs(budget));
}

}  // namespace

void StreamParams::check() const {
    if (!(r > 0.0)) throw Error(Errc::parse, "stream rate must be positive");
    if (a < 0.0 || b < 0.0 || a_r < 0.0 || b_r < 0.0)
        throw Error(Errc::parse, "overhead coefficients must be non-negative");
}

void Population::check() const {
    if (n_server_copies < 1.0)
        throw Error(Errc::parse, "server capacity must be at least one stream copy");
    if (n_leechers < 0) throw Error(Errc::parse, "leecher count must be non-negative");
    for (size_t i = 0; i < seeders.size(); ++i) {
        const SeederSpec& s = seeders[i];
        if (s.upload < 0.0)
            throw Error(Errc::parse, "seeder S" + std::to_string(i) + " has negative upload");
        if (s.fanout_cap) {
            if (*s.fanout_cap < 1)
                throw Error(Errc::parse, "seeder S" + std::to_string(i) + " fanout cap below 1");
            if (*s.fanout_cap > n_leechers)
                throw Error(Errc::parse, "seeder S" + std::to_string(i) +
                                             " fanout cap exceeds leecher count");
        }
    }
}

double Population::subset_upload(const std::vector<int>& subset) const {
    double total = 0.0;
    for (int i : subset) total += seeders.at(i).upload;
    return total;
}

std::vector<int> resolve_subset(const Population& pop, const std::vector<int>& subset) {
    std::vector<int> out;
    if (subset.empty()) {
        out.resize(pop.seeders.size());
        for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
        return out;
    }
    std::set<int> seen;
    for (int i : subset) {
        if (i < 0 || i >= static_cast<int>(pop.seeders.size()))
            throw Error(Errc::usage, "subset index out of range: " + std::to_string(i));
        if (!seen.insert(i).second)
            throw Error(Errc::usage, "duplicate subset index: " + std::to_string(i));
        out.push_back(i);
    }
    return out;
}

std::string NodeId::str() const {
    switch (kind) {
        case Kind::server: return "server";
        case Kind::seeder: return "S" + std::to_string(index);
        case Kind::leecher: return "L" + std::to_string(index);
    }
    return "?";
}

NodeId NodeId::parse(const std::string& s) {
    if (s == "server") return srv();
    if (s.size() >= 2 && (s[0] == 'S' || s[0] == 'L')) {
        int idx = 0;
        auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), idx);
        if (ec == std::errc() && ptr == s.data() + s.size() && idx >= 0)
            return s[0] == 'S' ? seeder(idx) : leecher(idx);
    }
    throw Error(Errc::parse, "bad node id: " + s);
}

const char* violation_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::possession: return "POSSESSION";
        case ViolationKind::overlap: return "OVERLAP";
        case ViolationKind::incomplete_leecher: return "INCOMPLETE_LEECHER";
        case ViolationKind::budget: return "BUDGET";
        case ViolationKind::fanout: return "FANOUT";
    }
    return "?";
}

const char* model_name(Model m) {
    switch (m) {
        case Model::perfect: return "perfect";
        case Model::fanout: return "fanout";
        case Model::overhead: return "overhead";
    }
    return "?";
}

Model parse_model(const std::string& s) {
    if (s == "perfect") return Model::perfect;
    if (s == "fanout") return Model::fanout;
    if (s == "overhead") return Model::overhead;
    throw Error(Errc::usage, "unknown model: " + s);
}

double edge_cost(const StreamParams& p, double goodput) {
    if (goodput <= 0.0) return 0.0;
    return (1.0 + p.a) * goodput + p.b;
}

double receiver_cost(const StreamParams& p, double goodput) {
    if (goodput <= 0.0) return 0.0;
    return p.a_r * goodput + p.b_r;
}

namespace {

// Dense node indexing: server, then seeders, then leechers.
struct Index {
    int n_seeders;
    int n_leechers;
    int count() const { return 1 + n_seeders + n_leechers; }
    int of(const NodeId& id) const {
        switch (id.kind) {
            case NodeId::Kind::server: return 0;
            case NodeId::Kind::seeder: return 1 + id.index;
            case NodeId::Kind::leecher: return 1 + n_seeders + id.index;
        }
        return -1;
    }
    NodeId id(int dense) const {
        if (dense == 0) return NodeId::srv();
        if (dense <= n_seeders) return NodeId::seeder(dense - 1);
        return NodeId::leecher(dense - 1 - n_seeders);
    }
};

}  // namespace

void DiffusionScheme::check_well_formed(const Population& pop) const {
    if (slot_count < 1) throw Error(Errc::parse, "slot_count must be positive");
    std::set<std::pair<int, int>> pairs;
    Index ix{static_cast<int>(pop.seeders.size()), pop.n_leechers};
    for (const Edge& e : edges) {
        auto in_range = [&](const NodeId& n) {
            if (n.kind == NodeId::Kind::seeder) return n.index < ix.n_seeders;
            if (n.kind == NodeId::Kind::leecher) return n.index < ix.n_leechers;
            return true;
        };
        if (!in_range(e.from) || !in_range(e.to))
            throw Error(Errc::parse, "edge references unknown node " + e.from.str() + "->" + e.to.str());
        if (e.from == e.to) throw Error(Errc::parse, "self edge at " + e.from.str());
        if (!pairs.insert({ix.of(e.from), ix.of(e.to)}).second)
            throw Error(Errc::parse, "duplicate edge " + e.from.str() + "->" + e.to.str());
        int last = -1;
        for (int s : e.slots) {
            if (s < 0 || s >= slot_count)
                throw Error(Errc::parse, "slot out of range on " + e.from.str() + "->" + e.to.str());
            if (s <= last)
                throw Error(Errc::parse, "slots not sorted/unique on " + e.from.str() + "->" + e.to.str());
            last = s;
        }
    }
}

ValidationResult validate_scheme(const StreamParams& p, const Population& pop,
                                 const DiffusionScheme& scheme, Model model) {
    p.check();
    pop.check();
    scheme.check_well_formed(pop);

    const int K = scheme.slot_count;
    const double slot_rate = p.r / K;
    Index ix{static_cast<int>(pop.seeders.size()), pop.n_leechers};
    ValidationResult res;
    auto flag = [&](ViolationKind k, const std::string& where, const std::string& detail) {
        res.ok = false;
        res.violations.push_back({k, where, detail});
    };

    // Incoming slot sets per node; overlaps reported as they appear.
    std::vector<std::vector<char>> have(ix.count(), std::vector<char>(K, 0));
    for (const Edge& e : scheme.edges) {
        auto& dst = have[ix.of(e.to)];
        for (int s : e.slots) {
            if (dst[s])
                flag(ViolationKind::overlap, e.to.str(),
                     "slot " + std::to_string(s) + " received more than once");
            dst[s] = 1;
        }
    }

    for (const Edge& e : scheme.edges) {
        if (e.from.kind == NodeId::Kind::server) continue;  // server has the full stream
        const auto& src = have[ix.of(e.from)];
        for (int s : e.slots) {
            if (!src[s]) {
                flag(ViolationKind::possession, e.from.str() + "->" + e.to.str(),
                     "slot " + std::to_string(s) + " forwarded but never received");
                break;
            }
        }
    }

    for (int l = 0; l < ix.n_leechers; ++l) {
        const auto& got = have[ix.of(NodeId::leecher(l))];
        int missing = 0;
        for (int s = 0; s < K; ++s)
            if (!got[s]) ++missing;
        if (missing > 0)
            flag(ViolationKind::incomplete_leecher, NodeId::leecher(l).str(),
                 std::to_string(missing) + " of " + std::to_string(K) + " slots missing");
    }

    // Upload budgets. Under perfect/fanout a connection costs its goodput;
    // under overhead it costs (1+a)g+b and receivers with a modeled upload
    // (seeders) are also charged a_r*g+b_r per input connection.
    std::vector<double> used(ix.count(), 0.0);
    std::vector<int> out_edges(ix.count(), 0);
    for (const Edge& e : scheme.edges) {
        if (e.slots.empty()) continue;
        double g = static_cast<double>(e.slots.size()) * slot_rate;
        int f = ix.of(e.from);
        used[f] += model == Model::overhead ? edge_cost(p, g) : g;
        out_edges[f] += 1;
        if (model == Model::overhead && e.to.kind == NodeId::Kind::seeder)
            used[ix.of(e.to)] += receiver_cost(p, g);
    }
    double server_budget = pop.n_server_copies *
                           (model == Model::overhead ? p.full_connection_cost() : p.r);
    for (int n = 0; n < ix.count(); ++n) {
        NodeId id = ix.id(n);
        double budget = 0.0;
        if (id.kind == NodeId::Kind::server) budget = server_budget;
        else if (id.kind == NodeId::Kind::seeder) budget = pop.seeders[id.index].upload;
        if (used[n] > 0.0 && !within_budget(used[n], budget))
            flag(ViolationKind::budget, id.str(),
                 "uses " + std::to_string(used[n]) + " of " + std::to_string(budget));
        if (model == Model::fanout && id.kind == NodeId::Kind::seeder) {
            const auto& cap = pop.seeders[id.index].fanout_cap;
            if (cap && out_edges[n] > *cap)
                flag(ViolationKind::fanout, id.str(),
                     std::to_string(out_edges[n]) + " connections exceed cap " +
                         std::to_string(*cap));
        }
    }
    return res;
}

EfficiencyReport measure_efficiency(const StreamParams& p, const Population& pop,
                                    const DiffusionScheme& scheme,
                                    const std::vector<int>& subset_in) {
    p.check();
    pop.check();
    scheme.check_well_formed(pop);
    std::vector<int> subset = resolve_subset(pop, subset_in);

    const int K = scheme.slot_count;
    const double slot_rate = p.r / K;
    Index ix{static_cast<int>(pop.seeders.size()), pop.n_leechers};

    std::vector<char> member(ix.n_seeders, 0);
    for (int i : subset) member[i] = 1;

    std::vector<long long> in_slots(ix.count(), 0);
    std::vector<long long> out_peer_slots(ix.count(), 0);
    std::vector<int> fanout_used(ix.count(), 0);
    std::vector<double> goodput_out(ix.count(), 0.0), cost_out(ix.count(), 0.0),
        recv_charge(ix.count(), 0.0);
    long long gain = 0;  // slots leaving the subset minus slots entering it

    for (const Edge& e : scheme.edges) {
        if (e.slots.empty()) continue;
        long long k = static_cast<long long>(e.slots.size());
        double g = static_cast<double>(k) * slot_rate;
        int f = ix.of(e.from), t = ix.of(e.to);
        in_slots[t] += k;
        if (e.to.kind != NodeId::Kind::server) out_peer_slots[f] += k;
        fanout_used[f] += 1;
        goodput_out[f] += g;
        cost_out[f] += edge_cost(p, g);
        recv_charge[t] += receiver_cost(p, g);

        bool from_in = e.from.kind == NodeId::Kind::seeder && member[e.from.index];
        bool to_in = e.to.kind == NodeId::Kind::seeder && member[e.to.index];
        if (from_in && !to_in && e.to.kind != NodeId::Kind::server) gain += k;
        if (!from_in && to_in) gain -= k;
    }

    EfficiencyReport rep;
    long long sum_individual = 0;
    for (int s : subset) {
        SeederMeasure m;
        m.seeder = s;
        int n = ix.of(NodeId::seeder(s));
        m.input_rate = static_cast<double>(in_slots[n]) * slot_rate;
        m.useful_output_rate = static_cast<double>(out_peer_slots[n]) * slot_rate;
        m.fanout_used = fanout_used[n];
        double u = pop.seeders[s].upload;
        m.defined = u > 0.0;
        m.eta = m.defined
                    ? static_cast<double>(out_peer_slots[n] - in_slots[n]) * slot_rate / u
                    : std::nan("");
        sum_individual += out_peer_slots[n] - in_slots[n];
        rep.per_seeder.push_back(m);
    }
    assert(sum_individual == gain);
    (void)sum_individual;

    double total = pop.subset_upload(subset);
    if (total <= 0.0)
        throw Error(Errc::zero_upload, "subset has zero total upload, efficiency undefined");
    rep.set_gain_slots = gain;
    rep.set_efficiency = static_cast<double>(gain) * slot_rate / total;

    for (int n = 0; n < ix.count(); ++n) {
        if (goodput_out[n] == 0.0 && recv_charge[n] == 0.0) continue;
        rep.usage.push_back({ix.id(n), goodput_out[n], cost_out[n], recv_charge[n]});
    }
    return rep;
}

}  // namespace seedplan
