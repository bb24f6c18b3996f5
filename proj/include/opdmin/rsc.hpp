#pragma once

#include <cstdint>
#include <vector>

#include "opdmin/arms.hpp"
#include "opdmin/sym_matrix.hpp"

namespace opdmin {

// Diversity diagnostics for an arm set. kappa_hat upper-bounds nothing and
// lower-bounds nothing formally; it is the heuristic curvature probe.
struct CurvatureReport {
    double kappa_min = 0.0;
    double kappa_hat = 0.0;
    int restarts = 0;
    long pgd_iterations = 0;
    bool converged = false;
    SymMatrix best_delta;  // feasible direction achieving kappa_hat
};

// Error-cone specification around the hidden direction s: directions whose
// nuclear-norm mass concentrates near the model subspace,
// |Delta_perp|_nuc <= cone_factor * |Delta_aligned|_nuc.
struct ConeSpec {
    std::vector<double> s_direction;  // unit vector
    double cone_factor = 3.0;
};

// Minimum eigenvalue of (1/K) sum_i vec(X_i) vec(X_i)'. Zero whenever K < n^2
// (the average has rank at most K), otherwise computed from the assembled
// n^2 x n^2 matrix; clamped at zero against rounding.
double kappa_min(const ArmSet& arms);

// Membership test with the standard slack.
bool cone_contains(const SymMatrix& delta, const ConeSpec& cone, double slack = 1e-9);

// Splits delta into the aligned component P D + D P - P D P (P the projector
// onto s) and its remainder, then rescales the remainder onto the cone
// boundary when the membership inequality fails.
SymMatrix cone_project(const SymMatrix& delta, const ConeSpec& cone);

struct PgdOptions {
    int restarts = 8;
    int iterations = 1000;
    double step = 1.0;  // multiple of 1 / (2 lambda_max)
    std::uint64_t seed = 0;
};

// Projected gradient heuristic for the restricted curvature
//   min (1/T1) sum_t <X_t, Delta>^2
// over unit-Frobenius, cone-feasible, rank <= 2 symmetric directions.
// Each iteration: gradient step, rank-2 projection (two largest-magnitude
// eigenpairs), cone projection, renormalization. sample_indices selects the
// multiset of arms defining the objective; empty means every arm once.
CurvatureReport kappa_hat_pgd(const ArmSet& arms, const std::vector<int>& sample_indices,
                              const ConeSpec& cone, const PgdOptions& opts);

// Repeated-trial driver behind the `rsc` CLI subcommand. Each trial draws a
// fresh base graph, opinion vector, and arm set, then runs the PGD probe with
// oracle access to the drawn direction.
struct RscTrialConfig {
    int n = 32;
    int num_arms = 100;
    int trials = 25;
    GraphParams graph;
    ArmRegime regime = ArmRegime::Diverse;
    int num_edits = 0;  // 0 means 2|V| for the local regime
    double weight_lo = 0.5;
    double weight_hi = 1.5;
    PgdOptions pgd;
    std::uint64_t seed = 1;
};

struct RscSummary {
    double kappa_min_mean = 0.0;
    double kappa_hat_mean = 0.0;
    double kappa_hat_std = 0.0;
    int trials = 0;
};

RscSummary rsc_trials(const RscTrialConfig& cfg);

}  // namespace opdmin
