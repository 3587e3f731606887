#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seedplan {

enum class Errc {
    parse,
    usage,
    zero_upload,
    set_too_large,
    not_homogeneous,
    granularity,
    precondition_ubar,
    precondition_ux,
    rooting_failed,
    negative_radicand,
    no_solution,
    size_limit,
};

/// Coded error shared by all modules; the CLI maps codes to exit status.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code(code) {}
    Errc code;
};

enum class Model { perfect, fanout, overhead };

/// Stream rate plus the connection cost model. Sending goodput g over one
/// connection consumes (1+a)*g + b of the sender's upload; the optional
/// receiver-side charge a_r*g + b_r is billed to the receiver's upload.
struct StreamParams {
    double r = 100.0;  // stream rate, KBytes/s
    double a = 0.1;    // proportional sender overhead
    double b = 1.7;    // additive per-connection sender cost, KBytes/s
    double a_r = 0.0;  // proportional receiver overhead (default off)
    double b_r = 0.0;  // additive per-connection receiver cost (default off)

    /// Cost of one full-rate connection: R = (1+a)*r + b.
    double full_connection_cost() const { return (1.0 + a) * r + b; }
    /// Upper bound on any seeder efficiency under this cost model: r/R.
    double eta_max() const { return r / full_connection_cost(); }

    void check() const;
};

struct SeederSpec {
    double upload = 0.0;               // KBytes/s
    std::optional<long long> fanout_cap;  // max simultaneous out-connections
};

/// One server entity, N_L identical leechers, and an explicit seeder list.
/// Server bandwidth is expressed in stream copies: its upload budget is
/// n_server_copies * R under the overhead model (R = r when a = b = 0).
struct Population {
    double n_server_copies = 1.0;
    int n_leechers = 0;
    std::vector<SeederSpec> seeders;

    void check() const;
    double subset_upload(const std::vector<int>& subset) const;
};

/// Expands an empty subset to all seeder indices; validates indices.
std::vector<int> resolve_subset(const Population& pop, const std::vector<int>& subset);

struct NodeId {
    enum class Kind { server, seeder, leecher };
    Kind kind = Kind::server;
    int index = 0;

    static NodeId srv() { return {Kind::server, 0}; }
    static NodeId seeder(int i) { return {Kind::seeder, i}; }
    static NodeId leecher(int i) { return {Kind::leecher, i}; }

    bool operator==(const NodeId&) const = default;
    std::string str() const;
    /// Parses "server", "S<i>", "L<i>".
    static NodeId parse(const std::string& s);
};

/// Directed transfer of a slot set from one node to another.
struct Edge {
    NodeId from;
    NodeId to;
    std::vector<int> slots;  // sorted, unique, in [0, slot_count)
};

/// The stream is cut into slot_count equal slots of rate r/slot_count;
/// an edge carries the union of the listed slots.
struct DiffusionScheme {
    int slot_count = 1;
    std::vector<Edge> edges;

    /// Structural sanity: ids in range, slots sorted/unique/in range,
    /// no duplicate (from,to) pairs, no self-edges. Throws Errc::parse.
    void check_well_formed(const Population& pop) const;
};

enum class ViolationKind { possession, overlap, incomplete_leecher, budget, fanout };

struct Violation {
    ViolationKind kind;
    std::string where;
    std::string detail;
};

struct ValidationResult {
    bool ok = true;
    std::vector<Violation> violations;
};

const char* violation_name(ViolationKind k);
const char* model_name(Model m);
Model parse_model(const std::string& s);

/// Sender-side cost of a connection carrying goodput g; zero-goodput edges
/// cost nothing (no connection is opened).
double edge_cost(const StreamParams& p, double goodput);
/// Receiver-side charge for a connection carrying goodput g.
double receiver_cost(const StreamParams& p, double goodput);

/// Checks a scheme against a population under the given connectivity model:
/// senders only forward slots they received (server has everything), inputs
/// at any node are disjoint, every leecher ends up with the full slot set,
/// per-node upload budgets hold (with per-connection costs under overhead),
/// and seeder fanout caps hold under the fanout model. Reports all
/// violations instead of raising.
ValidationResult validate_scheme(const StreamParams& p, const Population& pop,
                                 const DiffusionScheme& scheme, Model model);

struct SeederMeasure {
    int seeder = 0;
    double input_rate = 0.0;
    double useful_output_rate = 0.0;  // goodput to peers (leechers/seeders)
    int fanout_used = 0;
    double eta = 0.0;
    bool defined = true;  // false when upload is zero
};

struct NodeUsage {
    NodeId node;
    double goodput_out = 0.0;
    double cost_out = 0.0;      // sender-side cost under the given params
    double receiver_charge = 0.0;
};

struct EfficiencyReport {
    std::vector<SeederMeasure> per_seeder;
    double set_efficiency = 0.0;
    /// Integer slot form of the set numerator: slots leaving the subset
    /// minus slots entering it. set_efficiency = gain*(r/K)/U_X.
    long long set_gain_slots = 0;
    std::vector<NodeUsage> usage;
};

/// Measures achieved diffusion efficiency of a seeder subset in a scheme.
/// Set efficiency uses the subset boundary (output to leechers and outside
/// seeders minus all input entering the subset), which equals the
/// upload-weighted mean of the individual efficiencies; both are computed
/// in exact slot units. Throws Errc::zero_upload if the subset uploads sum
/// to zero; a zero-upload member only marks its own entry undefined.
EfficiencyReport measure_efficiency(const StreamParams& p, const Population& pop,
                                    const DiffusionScheme& scheme,
                                    const std::vector<int>& subset);

}  // namespace seedplan
