#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seedplan/analytic.hpp"
#include "seedplan/builders.hpp"
#include "seedplan/dimensioning.hpp"
#include "seedplan/io.hpp"
#include "seedplan/model.hpp"
#include "seedplan/oracle.hpp"

using nlohmann::json;
using namespace seedplan;

namespace {

struct Args {
    std::string scenario_path;
    std::string overhead_choice;
    std::string model_str = "overhead";
    bool model_given = false;
    std::string out_path;
    std::string subset_str;
    std::string scheme_path;
    std::string builder = "broadcast";
    std::string generator = "eta_vs_u";
    std::string u_range;
    std::string beta_range;
    int slots = 0;
    int kmax = -1;
    int multiplier = 1;
    double beta = 0.0;
    double eta_leecher = -1.0;
    double cap = 1e6;
};

Scenario load_scenario_args(const Args& a, bool required) {
    Scenario sc;
    if (!a.scenario_path.empty()) {
        sc = load_scenario(a.scenario_path);
    } else if (required) {
        throw Error(Errc::usage, "--scenario is required for this command");
    }
    if (a.overhead_choice == "small") sc.params.b = 1.7;
    if (a.overhead_choice == "large") sc.params.b = 25.0;
    sc.params.check();
    return sc;
}

std::vector<int> parse_subset(const std::string& s) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        std::string tok = s.substr(pos, comma - pos);
        if (!tok.empty()) {
            if (tok[0] == 'S' || tok[0] == 's') tok = tok.substr(1);
            try {
                out.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw Error(Errc::usage, "bad subset entry: " + s.substr(pos, comma - pos));
            }
        }
        pos = comma + 1;
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 0.0, step = 1.0;
};

Range parse_range(const std::string& s) {
    Range r;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &r.lo, &r.hi, &r.step) != 3)
        throw Error(Errc::usage, "range must look like LO:HI:STEP, got " + s);
    return r;
}

json stream_json(const StreamParams& p) {
    return {{"r", p.r},       {"a", p.a},
            {"b", p.b},       {"a_r", p.a_r},
            {"b_r", p.b_r},   {"R", p.full_connection_cost()},
            {"eta_max", p.eta_max()}};
}

int cmd_efficiency(const Args& a) {
    Scenario sc = load_scenario_args(a, true);
    Model m = parse_model(a.model_str);
    std::vector<int> subset = resolve_subset(sc.pop, parse_subset(a.subset_str));

    json rep;
    rep["model"] = model_name(m);
    rep["stream"] = stream_json(sc.params);
    double total = sc.pop.subset_upload(subset);
    double mean_num = 0.0;
    json seeders = json::array();
    for (int idx : subset) {
        const SeederSpec& spec = sc.pop.seeders[idx];
        json e;
        e["id"] = NodeId::seeder(idx).str();
        e["upload"] = spec.upload;
        double eta = 0.0;
        switch (m) {
            case Model::perfect:
                eta = spec.upload > 0.0
                          ? eta_perfect_set(sc.pop.n_leechers, spec.upload, sc.params.r)
                          : 0.0;
                break;
            case Model::fanout: {
                long long c = spec.fanout_cap.value_or(sc.pop.n_leechers);
                e["fanout"] = c;
                eta = eta_fanout_single(spec.upload, c, sc.params.r);
                break;
            }
            case Model::overhead: {
                OverheadEfficiency res =
                    eta_overhead_exact(sc.params, spec.upload, sc.pop.n_leechers);
                eta = res.eta;
                e["c_opt"] = res.c_opt;
                e["input_rate"] = res.input_rate;
                e["regime"] = regime_name(res.regime);
                e["epsilon_bound"] = res.epsilon_bound;
                e["capped_by_population"] = res.capped_by_population;
                break;
            }
        }
        e["eta"] = eta;
        mean_num += eta * spec.upload;
        seeders.push_back(std::move(e));
    }
    rep["seeders"] = std::move(seeders);

    json set;
    set["upload"] = total;
    double mean = total > 0.0 ? mean_num / total : 0.0;
    set["eta_weighted_individuals"] = mean;
    switch (m) {
        case Model::perfect:
            set["eta"] =
                total > 0.0 ? eta_perfect_set(sc.pop.n_leechers, total, sc.params.r) : 0.0;
            break;
        case Model::fanout: {
            std::vector<std::pair<double, long long>> pairs;
            for (int idx : subset)
                pairs.push_back({sc.pop.seeders[idx].upload,
                                 sc.pop.seeders[idx].fanout_cap.value_or(sc.pop.n_leechers)});
            try {
                HomogeneousSetResult hs =
                    eta_fanout_homogeneous_set(pairs, sc.pop.n_leechers, sc.params.r);
                set["eta"] = hs.eta;
                set["max_set_size"] = hs.max_set_size;
            } catch (const Error& ex) {
                if (ex.code != Errc::not_homogeneous && ex.code != Errc::set_too_large) throw;
                set["eta"] = nullptr;
                set["note"] = std::string(ex.what()) +
                              "; the weighted mean of individual optima is an upper bound only";
            }
            break;
        }
        case Model::overhead:
            set["eta"] = mean;
            set["note"] = "aggregation neglected: joint value taken as the weighted mean";
            break;
    }
    rep["set"] = std::move(set);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_scheme(const Args& a) {
    Scenario sc = load_scenario_args(a, true);
    std::vector<int> subset = parse_subset(a.subset_str);

    DiffusionScheme scheme;
    Model m = Model::perfect;
    json rep;
    rep["builder"] = a.builder;
    if (a.builder == "broadcast") {
        if (a.slots < 1) throw Error(Errc::usage, "--slots is required for this builder");
        BroadcastPlan plan = build_perfect_broadcast(sc.params, sc.pop, subset, a.slots);
        scheme = std::move(plan.scheme);
        m = Model::perfect;
        rep["share_slots"] = plan.share_slots;
        rep["expected_eta"] = plan.expected_set_eta;
    } else if (a.builder == "trees") {
        if (a.slots < 1) throw Error(Errc::usage, "--slots is required for this builder");
        TreesPlan plan = build_homogeneous_trees(sc.params, sc.pop, subset, a.slots);
        scheme = std::move(plan.scheme);
        m = Model::fanout;
        rep["block_slots"] = plan.block_slots;
        rep["trees"] = plan.n_trees;
        rep["max_set_size"] = plan.max_set_size;
        rep["common_input_rate"] = plan.common_input_rate;
        rep["expected_eta"] = plan.expected_set_eta;
    } else if (a.builder == "monorate") {
        if (a.slots < 1) throw Error(Errc::usage, "--slots is required for this builder");
        MonoratePlan plan = build_monorate(sc.params, sc.pop, subset, a.slots);
        scheme = std::move(plan.scheme);
        m = Model::overhead;
        rep["input_slots"] = plan.input_slots;
        rep["input_rate"] = plan.input_rate;
        rep["connection_cost"] = plan.conn_cost;
        rep["fanouts"] = plan.fanouts;
        rep["bracket"] = {plan.bracket_lo, plan.bracket_hi};
        rep["expected_eta"] = plan.expected_set_eta;
    } else if (a.builder == "dichotomic") {
        DichotomicPlan plan =
            build_dichotomic(sc.params, sc.pop, subset, a.kmax, a.multiplier);
        scheme = std::move(plan.scheme);
        m = Model::overhead;
        rep["k_max"] = plan.k_max;
        json levels = json::array();
        for (const LevelChoice& c : plan.choices)
            levels.push_back({{"level", c.level}, {"eta_bin", c.eta_bin}, {"used", c.used}});
        rep["levels"] = std::move(levels);
        rep["weighted_mean_eta_bin"] = plan.weighted_mean_eta_bin;
        rep["expected_eta_lower"] = plan.expected_eta_lower;
        rep["root_waste_rate"] = plan.root_waste_rate;
        rep["curtailed_rate"] = plan.curtailed_rate;
        rep["longest_path"] = plan.longest_path;
        rep["server_cost"] = plan.server_cost;
    } else {
        throw Error(Errc::usage, "unknown builder: " + a.builder);
    }
    if (a.model_given) m = parse_model(a.model_str);

    rep["model"] = model_name(m);
    rep["slot_count"] = scheme.slot_count;
    rep["edges"] = scheme.edges.size();

    ValidationResult vr = validate_scheme(sc.params, sc.pop, scheme, m);
    rep["valid"] = vr.ok;
    if (!vr.ok) {
        json vio = json::array();
        for (const Violation& v : vr.violations)
            vio.push_back({{"kind", violation_name(v.kind)},
                           {"where", v.where},
                           {"detail", v.detail}});
        rep["violations"] = std::move(vio);
    }
    if (sc.pop.subset_upload(resolve_subset(sc.pop, subset)) > 0.0) {
        EfficiencyReport er = measure_efficiency(sc.params, sc.pop, scheme, subset);
        rep["measured_eta"] = er.set_efficiency;
    } else {
        rep["measured_eta"] = nullptr;
    }

    if (!a.out_path.empty()) {
        save_scheme(scheme, a.out_path);
        rep["scheme_file"] = a.out_path;
    } else {
        rep["scheme"] = json::parse(scheme_to_json(scheme));
    }
    std::cout << rep.dump(2) << "\n";
    return vr.ok ? 0 : 1;
}

int cmd_validate(const Args& a) {
    Scenario sc = load_scenario_args(a, true);
    if (a.scheme_path.empty()) throw Error(Errc::usage, "--scheme is required");
    Model m = parse_model(a.model_str);
    DiffusionScheme scheme = load_scheme(a.scheme_path);
    scheme.check_well_formed(sc.pop);
    ValidationResult vr = validate_scheme(sc.params, sc.pop, scheme, m);
    json rep;
    rep["ok"] = vr.ok;
    json vio = json::array();
    for (const Violation& v : vr.violations)
        vio.push_back(
            {{"kind", violation_name(v.kind)}, {"where", v.where}, {"detail", v.detail}});
    rep["violations"] = std::move(vio);
    std::cout << rep.dump(2) << "\n";
    return vr.ok ? 0 : 1;
}

int cmd_oracle(const Args& a) {
    Scenario sc = load_scenario_args(a, true);
    Model m = parse_model(a.model_str);
    if (a.slots < 1) throw Error(Errc::usage, "--slots is required");
    std::vector<int> subset = parse_subset(a.subset_str);
    OracleResult res = oracle_optimal(sc.params, sc.pop, subset, a.slots, m);
    json rep;
    rep["model"] = model_name(m);
    rep["slot_count"] = res.slot_count;
    rep["eta"] = {{"exact", res.eta.str()}, {"value", res.eta.to_double()}};
    rep["gain_slots"] = res.gain_slots;
    rep["explored"] = res.explored;
    if (!a.out_path.empty()) {
        save_scheme(res.witness, a.out_path);
        rep["witness_file"] = a.out_path;
    } else {
        rep["witness"] = json::parse(scheme_to_json(res.witness));
    }
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_dimension(const Args& a) {
    Scenario sc = load_scenario_args(a, false);
    ScalabilityQuery q{sc.params, a.beta, a.eta_leecher, a.cap};
    ScalabilityResult res = required_bandwidth(q);
    json rep;
    rep["stream"] = stream_json(sc.params);
    rep["beta"] = a.beta;
    rep["u"] = res.u;
    rep["eta_seeder"] = res.eta_seeder;
    rep["eta_leecher"] = res.eta_leecher;
    rep["note"] = "aggregation neglected: seeder set efficiency taken as the "
                  "single-seeder optimum at u";
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const Args& a) {
    Scenario sc = load_scenario_args(a, false);
    SweepRequest req;
    req.kind = sweep_kind_from_name(a.generator);
    req.params = sc.params;
    req.eta_leecher = a.eta_leecher;
    bool wants_beta = req.kind == SweepKind::u_vs_beta;
    const std::string& range = wants_beta ? a.beta_range : a.u_range;
    if (range.empty())
        throw Error(Errc::usage, wants_beta ? "--beta-range is required for this generator"
                                            : "--u-range is required for this generator");
    Range r = parse_range(range);
    req.lo = r.lo;
    req.hi = r.hi;
    req.step = r.step;
    SweepTable table = run_sweep(req);
    if (a.out_path.empty()) {
        write_csv(table, std::cout);
    } else {
        write_csv(table, a.out_path);
        json rep;
        rep["generator"] = sweep_kind_name(req.kind);
        rep["rows"] = table.rows.size();
        rep["file"] = a.out_path;
        std::cout << rep.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seeder efficiency planner for P2P live streaming"};
    app.require_subcommand(1);
    Args a;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", a.scenario_path, "scenario JSON file");
        sub->add_option("--overhead", a.overhead_choice,
                        "additive-cost preset: b=1.7 or b=25")
            ->check(CLI::IsMember({"small", "large"}));
        sub->add_option("--model", a.model_str, "perfect|fanout|overhead")
            ->check(CLI::IsMember({"perfect", "fanout", "overhead"}));
    };

    CLI::App* eff = app.add_subcommand("efficiency", "analytic per-seeder and set optima");
    add_common(eff);
    eff->add_option("--subset", a.subset_str, "seeder ids, e.g. S0,S2 (default all)");

    CLI::App* sch = app.add_subcommand("scheme", "build a diffusion scheme");
    add_common(sch);
    sch->add_option("--builder", a.builder, "broadcast|trees|monorate|dichotomic")
        ->check(CLI::IsMember({"broadcast", "trees", "monorate", "dichotomic"}));
    sch->add_option("--subset", a.subset_str, "seeder ids (default all)");
    sch->add_option("--slots", a.slots, "slot count K");
    sch->add_option("--kmax", a.kmax, "halving depth (dichotomic)");
    sch->add_option("--multiplier", a.multiplier, "K = 2^kmax * multiplier (dichotomic)");
    sch->add_option("--out", a.out_path, "write the scheme JSON here");

    CLI::App* val = app.add_subcommand("validate", "check a scheme file");
    add_common(val);
    val->add_option("--scheme", a.scheme_path, "scheme JSON file")->required();

    CLI::App* orc = app.add_subcommand("oracle", "exact optimum by exhaustive search");
    add_common(orc);
    orc->add_option("--subset", a.subset_str, "seeder ids (default all)");
    orc->add_option("--slots", a.slots, "slot count K")->required();
    orc->add_option("--out", a.out_path, "write the witness scheme here");

    CLI::App* dim = app.add_subcommand("dimension", "upload needed for scalability");
    add_common(dim);
    dim->add_option("--beta", a.beta, "seeders per leecher");
    dim->add_option("--eta-leecher", a.eta_leecher, "leecher efficiency (default eta_max)");
    dim->add_option("--cap", a.cap, "largest upload considered");

    CLI::App* swp = app.add_subcommand("sweep", "figure data as CSV");
    add_common(swp);
    swp->add_option("--generator", a.generator,
                    "eta_vs_u|eta_rel_vs_u|input_r_vs_u|bin_vs_opt|u_vs_beta|"
                    "general_vs_sender");
    swp->add_option("--u-range", a.u_range, "LO:HI:STEP");
    swp->add_option("--beta-range", a.beta_range, "LO:HI:STEP");
    swp->add_option("--eta-leecher", a.eta_leecher, "leecher efficiency (default eta_max)");
    swp->add_option("--out", a.out_path, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    a.model_given = app.get_subcommands()[0]->count("--model") > 0;

    try {
        if (app.got_subcommand(eff)) return cmd_efficiency(a);
        if (app.got_subcommand(sch)) return cmd_scheme(a);
        if (app.got_subcommand(val)) return cmd_validate(a);
        if (app.got_subcommand(orc)) return cmd_oracle(a);
        if (app.got_subcommand(dim)) return cmd_dimension(a);
        if (app.got_subcommand(swp)) return cmd_sweep(a);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code == Errc::parse || e.code == Errc::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
