#pragma once

#include "seedplan/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace seedplan {

struct ConservationResult {
    double margin = 0.0;  // weighted supply minus demand
    bool solvable = false;
};

/// Bandwidth conservation with efficiency weights: the system admits a
/// solution iff eta_l*alpha_l + eta_s*beta*alpha_s + eta_c*(N_C/N_L) >= 1.
/// Returns that sum minus 1 as the margin.
ConservationResult conservation_check(double alpha_l, double alpha_s, double beta,
                                      double n_c_over_n_l, double eta_l, double eta_s,
                                      double eta_c);

struct ScalabilityQuery {
    StreamParams params;
    double beta = 0.0;          // seeders per leecher
    double eta_leecher = -1.0;  // < 0 selects eta_max
    double cap = 1e6;           // largest upload considered
};

struct ScalabilityResult {
    double u = 0.0;
    double eta_seeder = 0.0;  // single-seeder optimum at that u
    double eta_leecher = 0.0;
};

/// Smallest homogeneous upload u with u*(eta_L + beta*eta_OPT(u)) >= r,
/// where eta_OPT is the exact discrete single-seeder optimum with an
/// effectively unbounded population (aggregation neglected). beta = 0
/// reduces to the closed form r/eta_L, which is exactly R when leechers
/// run at eta_max. Bisection to 1e-9 relative tolerance. Throws
/// NO_SOLUTION when even u = cap is not enough.
ScalabilityResult required_bandwidth(const ScalabilityQuery& q);

enum class SweepKind {
    eta_vs_u,          // exact vs continuous seeder optimum, with the gap bound
    eta_rel_vs_u,      // same pair normalized by eta_max
    input_r_vs_u,      // optimal input rate vs full-rate input, normalized
    bin_vs_opt,        // halving-ladder level efficiency vs optimum, normalized
    u_vs_beta,         // required bandwidth curve plus the no-cost reference
    general_vs_sender  // continuous best fanout with and without receiver charges
};

SweepKind sweep_kind_from_name(const std::string& name);
const char* sweep_kind_name(SweepKind k);

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct SweepRequest {
    SweepKind kind = SweepKind::eta_vs_u;
    StreamParams params;
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;
    double eta_leecher = -1.0;  // u_vs_beta only; < 0 selects eta_max
};

/// Evaluate one generator over {lo, lo+step, ..., <= hi}. Rows are filled in
/// parallel (SEEDPLAN_THREADS caps the worker count) but the resulting table
/// is deterministic. hi < lo yields a table with headers and no rows.
SweepTable run_sweep(const SweepRequest& req);

/// Header row then one line per x; values formatted with up to 12
/// significant digits, locale independent, byte-identical across runs.
void write_csv(const SweepTable& t, std::ostream& os);
void write_csv(const SweepTable& t, const std::string& path);

}  // namespace seedplan
