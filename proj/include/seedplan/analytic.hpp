#pragma once

#include "seedplan/model.hpp"

#include <vector>

namespace seedplan {

/// Best achievable set efficiency with unconstrained connectivity and no
/// connection cost: (1 - 1/N_L) * min(1, N_L*r / U_X).
double eta_perfect_set(long long n_leechers, double total_upload, double r);

/// Best achievable efficiency of one seeder limited to c simultaneous
/// out-connections, no connection cost: (1 - 1/c) * min(1, r*c/u).
double eta_fanout_single(double u, long long c, double r);

struct HomogeneousSetResult {
    double eta = 0.0;            // upload-weighted mean of (1 - 1/c_s)
    long long max_set_size = 0;  // how many such seeders can jointly hit it
    double common_input_rate = 0.0;  // e, with u_s = e * c_s
};

/// Joint optimum for fanout-limited seeders whose uploads are proportional
/// to their caps (u_s = e*c_s for a common e <= r). Throws NOT_HOMOGENEOUS
/// when the ratios disagree and SET_TOO_LARGE when the set exceeds
/// floor((N_L-1)/(max c - 1)) * floor(r/e).
HomogeneousSetResult eta_fanout_homogeneous_set(const std::vector<std::pair<double, long long>>& set,
                                                long long n_leechers, double r);

/// Efficiency of one seeder under the linear cost model when it opens
/// exactly c connections: max(0, min((c-1)r/u, ((1-1/c) - (b/u)(c-1))/(1+a))).
double eta_given_u_c(const StreamParams& p, double u, long long c);

enum class Regime { zero, medium, high, overprovisioned };

const char* regime_name(Regime r);

struct OverheadEfficiency {
    double eta = 0.0;
    long long c_opt = 0;
    double input_rate = 0.0;  // per-connection goodput e at c_opt
    Regime regime = Regime::zero;
    double epsilon_bound = 0.0;
    bool capped_by_population = false;  // the N_L cap bit into the optimum
};

/// Best single-seeder efficiency under the linear cost model, maximizing
/// over the integer connection count c in [1, min(N_L, floor(u/b))].
/// u <= 2b yields zero; u >= N_L*R yields the overprovisioned closed form.
OverheadEfficiency eta_overhead_exact(const StreamParams& p, double u, long long n_leechers);

/// Continuous-c approximation of the same optimum:
/// (1-sqrt(b/u))^2/(1+a) for 2b <= u <= R^2/b, r/R - r/u above.
double eta_overhead_continuous(const StreamParams& p, double u);

/// Bound on the gap between the exact and continuous optima:
/// (b/u)^(3/2)/(1+a) in the medium regime, min(b/u, (b/R)^2)/(1+a) above.
double epsilon_bound(const StreamParams& p, double u);

/// Best efficiency when every connection must carry the full input rate r
/// (no substream splitting). Zero for u < R.
double eta_input_r(const StreamParams& p, double u);

/// Continuous optimal connection count when receiver-side charges are on:
/// (-a_r*b + sqrt(b(a+a_r+1)(u - b_r - a*b_r + a_r*b + a*u))) / (b(1+a)).
/// Reduces exactly to sqrt(u/b) when a_r = b_r = 0. Throws
/// NEGATIVE_RADICAND when u is too small to open any connection.
double c_opt_general(const StreamParams& p, double u);

}  // namespace seedplan
