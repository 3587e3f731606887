#include "seedplan/dimensioning.hpp"

#include "seedplan/analytic.hpp"
#include "seedplan/builders.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace seedplan {

namespace {

constexpr double kRelTol = 1e-9;
// stand-in for "as many leechers as needed": large enough that neither the
// population fanout cap nor the overprovisioned branch can bite below 1e6
constexpr long long kLargePopulation = 1'000'000'000LL;

double eta_opt(const StreamParams& p, double u) {
    return u > 0.0 ? eta_overhead_exact(p, u, kLargePopulation).eta : 0.0;
}

}  // namespace

ConservationResult conservation_check(double alpha_l, double alpha_s, double beta,
                                      double n_c_over_n_l, double eta_l, double eta_s,
                                      double eta_c) {
    for (double v : {alpha_l, alpha_s, beta, n_c_over_n_l})
        if (!(v >= 0.0)) throw Error(Errc::usage, "rates and ratios must be nonnegative");
    for (double e : {eta_l, eta_s, eta_c})
        if (!(e >= 0.0 && e <= 1.0)) throw Error(Errc::usage, "efficiencies must be in [0,1]");
    double margin = eta_l * alpha_l + eta_s * beta * alpha_s + eta_c * n_c_over_n_l - 1.0;
    return {margin, margin >= 0.0};
}

ScalabilityResult required_bandwidth(const ScalabilityQuery& q) {
    const StreamParams& p = q.params;
    p.check();
    if (!(q.beta >= 0.0)) throw Error(Errc::usage, "beta must be nonnegative");
    if (!(q.cap > 0.0)) throw Error(Errc::usage, "cap must be positive");
    double eta_l = q.eta_leecher < 0.0 ? p.eta_max() : q.eta_leecher;
    if (eta_l > p.eta_max() * (1.0 + kRelTol))
        throw Error(Errc::usage, "leecher efficiency above eta_max");

    if (q.beta == 0.0) {
        if (!(eta_l > 0.0))
            throw Error(Errc::no_solution, "no seeders and idle leechers cannot scale");
        double u = q.eta_leecher < 0.0 ? p.full_connection_cost() : p.r / eta_l;
        if (u > q.cap * (1.0 + kRelTol))
            throw Error(Errc::no_solution, "required bandwidth exceeds the cap");
        return {u, eta_opt(p, u), eta_l};
    }

    // u*(eta_l + beta*eta_OPT(u)) is nondecreasing in u: both u*eta_l and
    // the best gain rate u*eta_OPT(u) are, so one bisection suffices
    auto enough = [&](double u) { return u * (eta_l + q.beta * eta_opt(p, u)) >= p.r; };
    if (!enough(q.cap))
        throw Error(Errc::no_solution, "required bandwidth exceeds the cap");
    double lo = 0.0, hi = q.cap;
    for (int it = 0; it < 200 && hi - lo > kRelTol * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (enough(mid) ? hi : lo) = mid;
    }
    return {hi, eta_opt(p, hi), eta_l};
}

SweepKind sweep_kind_from_name(const std::string& name) {
    if (name == "eta_vs_u") return SweepKind::eta_vs_u;
    if (name == "eta_rel_vs_u") return SweepKind::eta_rel_vs_u;
    if (name == "input_r_vs_u") return SweepKind::input_r_vs_u;
    if (name == "bin_vs_opt") return SweepKind::bin_vs_opt;
    if (name == "u_vs_beta") return SweepKind::u_vs_beta;
    if (name == "general_vs_sender") return SweepKind::general_vs_sender;
    throw Error(Errc::usage, "unknown sweep generator: " + name);
}

const char* sweep_kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::eta_vs_u: return "eta_vs_u";
        case SweepKind::eta_rel_vs_u: return "eta_rel_vs_u";
        case SweepKind::input_r_vs_u: return "input_r_vs_u";
        case SweepKind::bin_vs_opt: return "bin_vs_opt";
        case SweepKind::u_vs_beta: return "u_vs_beta";
        case SweepKind::general_vs_sender: return "general_vs_sender";
    }
    return "?";
}

namespace {

unsigned worker_count(size_t rows) {
    unsigned t = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SEEDPLAN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v <= 256) t = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<size_t>(t, std::max<size_t>(rows, 1)));
}

}  // namespace

SweepTable run_sweep(const SweepRequest& req) {
    const StreamParams& p = req.params;
    p.check();
    if (!(req.step > 0.0)) throw Error(Errc::usage, "step must be positive");

    SweepTable out;
    switch (req.kind) {
        case SweepKind::eta_vs_u:
            out.columns = {"u", "eta_exact", "eta_continuous", "epsilon_bound"};
            break;
        case SweepKind::eta_rel_vs_u:
            out.columns = {"u", "eta_exact_rel", "eta_continuous_rel"};
            break;
        case SweepKind::input_r_vs_u:
            out.columns = {"u", "eta_opt_rel", "eta_input_r_rel"};
            break;
        case SweepKind::bin_vs_opt:
            out.columns = {"u", "eta_opt_rel", "eta_bin_rel"};
            break;
        case SweepKind::u_vs_beta:
            out.columns = {"beta", "u_required", "u_no_cost"};
            break;
        case SweepKind::general_vs_sender:
            out.columns = {"u", "c_opt_sender", "c_opt_general"};
            break;
    }
    if (req.hi < req.lo) return out;

    size_t n = static_cast<size_t>(std::floor((req.hi - req.lo) / req.step + kRelTol)) + 1;
    out.rows.assign(n, {});

    StreamParams no_cost = p;
    no_cost.a = no_cost.b = no_cost.a_r = no_cost.b_r = 0.0;
    double eta_max = p.eta_max();

    auto make_row = [&](double x) -> std::vector<double> {
        switch (req.kind) {
            case SweepKind::eta_vs_u:
                return {x, eta_opt(p, x), eta_overhead_continuous(p, x), epsilon_bound(p, x)};
            case SweepKind::eta_rel_vs_u:
                return {x, eta_opt(p, x) / eta_max, eta_overhead_continuous(p, x) / eta_max};
            case SweepKind::input_r_vs_u:
                return {x, eta_opt(p, x) / eta_max, eta_input_r(p, x) / eta_max};
            case SweepKind::bin_vs_opt:
                return {x, eta_opt(p, x) / eta_max, choose_level(p, x, -1).eta_bin / eta_max};
            case SweepKind::u_vs_beta: {
                ScalabilityQuery q{p, x, req.eta_leecher, 1e6};
                ScalabilityQuery ref{no_cost, x, -1.0, 1e6};
                return {x, required_bandwidth(q).u, required_bandwidth(ref).u};
            }
            case SweepKind::general_vs_sender: {
                if (!(p.b > 0.0))
                    throw Error(Errc::usage, "fanout optimum needs a positive additive cost");
                double general;
                try {
                    general = c_opt_general(p, x);
                } catch (const Error& e) {
                    if (e.code != Errc::negative_radicand) throw;
                    general = std::numeric_limits<double>::quiet_NaN();
                }
                return {x, std::sqrt(x / p.b), general};
            }
        }
        return {};
    };

    unsigned workers = worker_count(n);
    std::atomic<size_t> next{0};
    std::exception_ptr fail;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            if (failed.load()) return;
            try {
                out.rows[i] = make_row(req.lo + static_cast<double>(i) * req.step);
            } catch (...) {
                if (!failed.exchange(true)) fail = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) std::rethrow_exception(fail);
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(const SweepTable& t, std::ostream& os) {
    for (size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << fmt(row[c]);
        os << '\n';
    }
}

void write_csv(const SweepTable& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error(Errc::usage, "cannot open " + path + " for writing");
    write_csv(t, os);
}

}  // namespace seedplan
