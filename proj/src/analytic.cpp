#include "seedplan/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seedplan {

namespace {

constexpr double kRelTol = 1e-9;

// floor/ceil with a small nudge so exact-boundary ratios computed in
// floating point land on the intended integer
long long floor_tol(double x) { return static_cast<long long>(std::floor(x + kRelTol)); }
long long ceil_tol(double x) { return static_cast<long long>(std::ceil(x - kRelTol)); }

}  // namespace

double eta_perfect_set(long long n_leechers, double total_upload, double r) {
    if (n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    if (!(r > 0.0)) throw Error(Errc::usage, "stream rate must be positive");
    if (!(total_upload > 0.0))
        throw Error(Errc::zero_upload, "set upload must be positive");
    double nl = static_cast<double>(n_leechers);
    double fill = std::min(1.0, nl * r / total_upload);
    return (1.0 - 1.0 / nl) * fill;
}

double eta_fanout_single(double u, long long c, double r) {
    if (c < 1) throw Error(Errc::usage, "connection cap must be at least 1");
    if (!(r > 0.0)) throw Error(Errc::usage, "stream rate must be positive");
    double base = 1.0 - 1.0 / static_cast<double>(c);
    if (u <= r * static_cast<double>(c)) return base;
    return base * (r * static_cast<double>(c) / u);
}

HomogeneousSetResult eta_fanout_homogeneous_set(
    const std::vector<std::pair<double, long long>>& set, long long n_leechers, double r) {
    if (set.empty()) throw Error(Errc::usage, "empty seeder set");
    if (n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    double e = 0.0;
    long long max_c = 1;
    for (auto [u, c] : set) {
        if (c < 1) throw Error(Errc::usage, "connection cap must be at least 1");
        max_c = std::max(max_c, c);
    }
    e = set[0].first / static_cast<double>(set[0].second);
    for (auto [u, c] : set) {
        double ei = u / static_cast<double>(c);
        if (std::fabs(ei - e) > kRelTol * std::max(1.0, std::fabs(e)))
            throw Error(Errc::not_homogeneous,
                        "uploads are not proportional to connection caps");
    }
    if (!(e > 0.0)) throw Error(Errc::zero_upload, "set upload must be positive");

    long long trees = e > r ? 0 : floor_tol(r / e);
    long long per_tree = max_c > 1
                             ? (n_leechers - 1) / (max_c - 1)
                             : std::numeric_limits<long long>::max();
    long long bound;
    if (trees == 0) bound = 0;
    else if (per_tree > std::numeric_limits<long long>::max() / trees) bound = std::numeric_limits<long long>::max();
    else bound = per_tree * trees;

    if (static_cast<long long>(set.size()) > bound)
        throw Error(Errc::set_too_large,
                    "set of " + std::to_string(set.size()) +
                        " exceeds joint-optimum capacity " + std::to_string(bound));

    double num = 0.0, den = 0.0;
    for (auto [u, c] : set) {
        num += (1.0 - 1.0 / static_cast<double>(c)) * u;
        den += u;
    }
    return {num / den, bound, e};
}

double eta_given_u_c(const StreamParams& p, double u, long long c) {
    p.check();
    if (c < 1 || !(u > 0.0)) return 0.0;
    double cd = static_cast<double>(c);
    double full = (cd - 1.0) * p.r / u;  // every connection at the stream rate
    double split = ((1.0 - 1.0 / cd) - (p.b / u) * (cd - 1.0)) / (1.0 + p.a);
    return std::max(0.0, std::min(full, split));
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::zero: return "zero";
        case Regime::medium: return "medium";
        case Regime::high: return "high";
        case Regime::overprovisioned: return "overprovisioned";
    }
    return "?";
}

namespace {

// Argmax of eta_given_u_c over integer c in [1, cap]. The objective is the
// min of an increasing and a strictly concave function of c, hence unimodal:
// small ranges are scanned outright, large ones probe the integers around
// the continuous optimizers (sqrt(u/b) and u/R) plus the interval ends.
std::pair<long long, double> best_connection_count(const StreamParams& p, double u,
                                                   long long cap) {
    auto eval = [&](long long c) { return eta_given_u_c(p, u, c); };
    long long best_c = 1;
    double best = eval(1);
    auto consider = [&](long long c) {
        if (c < 1 || c > cap) return;
        double v = eval(c);
        if (v > best || (v == best && c < best_c)) {
            best = v;
            best_c = c;
        }
    };
    if (cap <= 4096) {
        for (long long c = 2; c <= cap; ++c) {
            double v = eval(c);
            if (v > best) {
                best = v;
                best_c = c;
            }
        }
        return {best_c, best};
    }
    std::vector<long long> centers;
    if (p.b > 0.0) centers.push_back(floor_tol(std::sqrt(u / p.b)));
    centers.push_back(floor_tol(u / p.full_connection_cost()));
    centers.push_back(1);
    centers.push_back(cap);
    for (long long c0 : centers)
        for (long long d = -2; d <= 2; ++d) consider(c0 + d);
    return {best_c, best};
}

}  // namespace

OverheadEfficiency eta_overhead_exact(const StreamParams& p, double u, long long n_leechers) {
    p.check();
    if (n_leechers < 1) throw Error(Errc::usage, "need at least one leecher");
    if (!(u > 0.0)) return {0.0, 0, 0.0, Regime::zero, 0.0, false};

    double R = p.full_connection_cost();
    OverheadEfficiency out;
    if (u >= static_cast<double>(n_leechers) * R) {
        double nl = static_cast<double>(n_leechers);
        out.eta = (nl - 1.0) * p.r / u;
        out.c_opt = n_leechers;
        out.input_rate = p.r;
        out.regime = Regime::overprovisioned;
        out.epsilon_bound = 0.0;
        return out;
    }
    if (u <= 2.0 * p.b) {
        out.regime = Regime::zero;
        return out;
    }

    long long cap = n_leechers;
    if (p.b > 0.0) cap = std::min(cap, std::max<long long>(1, floor_tol(u / p.b)));
    auto [c, eta] = best_connection_count(p, u, cap);
    out.eta = eta;
    out.c_opt = c;
    double cd = static_cast<double>(c);
    out.input_rate = u >= R * cd ? p.r : (u / cd - p.b) / (1.0 + p.a);
    out.regime = u * p.b <= R * R ? Regime::medium : Regime::high;
    out.epsilon_bound = epsilon_bound(p, u);
    double c_star = out.regime == Regime::medium
                        ? (p.b > 0.0 ? std::sqrt(u / p.b)
                                     : std::numeric_limits<double>::infinity())
                        : u / R;
    out.capped_by_population = c_star > static_cast<double>(n_leechers);
    return out;
}

double eta_overhead_continuous(const StreamParams& p, double u) {
    p.check();
    if (u <= 2.0 * p.b || !(u > 0.0)) return 0.0;
    double R = p.full_connection_cost();
    if (u * p.b <= R * R) {
        double s = 1.0 - std::sqrt(p.b / u);
        return s * s / (1.0 + p.a);
    }
    return p.r / R - p.r / u;
}

double epsilon_bound(const StreamParams& p, double u) {
    p.check();
    if (p.b == 0.0) return 0.0;
    if (u <= 2.0 * p.b) return 0.0;
    double R = p.full_connection_cost();
    if (u * p.b <= R * R) return std::pow(p.b / u, 1.5) / (1.0 + p.a);
    return std::min(p.b / u, (p.b / R) * (p.b / R)) / (1.0 + p.a);
}

double eta_input_r(const StreamParams& p, double u) {
    p.check();
    if (!(u > 0.0)) return 0.0;
    double R = p.full_connection_cost();
    long long fl = floor_tol(u / R), ce = ceil_tol(u / R);
    double whole = p.r * (static_cast<double>(fl) - 1.0) / u;
    double padded = (1.0 - (p.b / u) * static_cast<double>(ce)) / (1.0 + p.a) - p.r / u;
    return std::max({0.0, whole, padded});
}

double c_opt_general(const StreamParams& p, double u) {
    p.check();
    if (!(p.b > 0.0))
        throw Error(Errc::usage, "connection-count optimum needs a positive additive cost");
    double radicand = p.b * (p.a + p.a_r + 1.0) *
                      (u - p.b_r - p.a * p.b_r + p.a_r * p.b + p.a * u);
    if (radicand < 0.0)
        throw Error(Errc::negative_radicand,
                    "upload too small to open a connection under receiver charges");
    return (-p.a_r * p.b + std::sqrt(radicand)) / (p.b * (1.0 + p.a));
}

}  // namespace seedplan
