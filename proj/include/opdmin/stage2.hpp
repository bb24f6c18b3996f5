#pragma once

#include <cstdint>
#include <vector>

#include "opdmin/environment.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/stage1.hpp"

namespace opdmin {

enum class BetaForm {
    Determinant,  // self-normalized radius from log det(A)
    Dimensional   // simpler d log((1 + t Lx^2 / lambda) / delta) bound
};

enum class LxMode { SqrtN, Conservative };  // action-norm bound for the full baseline

struct OfulOptions {
    double lambda_reg = 0.1;
    double s_bound = 1.0;   // bound on |theta*|
    double lx_bound = 1.0;  // bound on |x|
    double sigma = 0.1;
    double delta = 0.001;
    BetaForm beta_form = BetaForm::Determinant;
    long refactor_interval = 512;
    double beta_override = -1.0;  // test hook; >= 0 pins the radius
};

// Fixed arm features, stored both row-major (selection) and transposed
// (batched confidence-width solves).
struct FeatureSet {
    int k = 0;
    int d = 0;
    std::vector<double> rows;  // k x d
    std::vector<double> cols;  // d x k

    static FeatureSet from(const std::vector<ReducedArm>& arms);
    static FeatureSet from_raw(const std::vector<std::vector<double>>& feats);
    const double* row(int i) const { return rows.data() + static_cast<std::size_t>(i) * d; }
};

// Ridge design state with optimistic (lower confidence bound) selection.
// Losses are minimized, so optimism subtracts the width.
class BanditState {
public:
    BanditState(int d, const OfulOptions& opts);

    int select(const FeatureSet& features);
    void update(const double* x, double y);

    long rounds() const { return t_; }
    int dim() const { return d_; }
    double beta() const;
    std::vector<double> theta_hat() const;
    const SymMatrix& design() const { return a_; }
    const std::vector<double>& response() const { return b_; }
    double max_solve_residual() const { return max_residual_; }

    // |v|_{A^{-1}} for a single vector; used by tests and diagnostics.
    double ellipsoid_norm(const std::vector<double>& v) const;

private:
    void refactor();

    int d_;
    OfulOptions opts_;
    SymMatrix a_;
    std::vector<double> b_;
    long t_ = 0;
    CholeskyFactor chol_;
    long updates_since_refactor_ = 0;
    double max_residual_ = 0.0;
    std::vector<double> workspace_;
};

struct AlgoConfig {
    long horizon = 10000;
    long t1 = 100;
    double delta = 0.001;
    double lambda_reg = 0.1;
    LambdaMode lambda_mode = LambdaMode::None;
    ExploreMode explore_mode = ExploreMode::Auto;
    LxMode lx_mode = LxMode::SqrtN;
    BetaForm beta_form = BetaForm::Determinant;
    EstimatorOptions estimator;
    bool reuse_stage1 = false;
    std::uint64_t algo_seed = 0;
    double beta_override = -1.0;  // test hook

    // Optional sink for the Stage-1 estimate (diagnostic dumps, tests).
    ThetaEstimate* stage1_out = nullptr;
};

// Two-stage algorithm: uniform exploration, nuclear-norm subspace estimation,
// then OFUL over the 2n-1 dimensional rotated features. Exploration rounds
// accrue regret in the returned trace.
RegretTrace run_estr(Environment& env, const ArmSet& arms, const AlgoConfig& cfg);

// Baseline: OFUL directly over vectorized forest matrices (dimension n^2).
RegretTrace run_full_oful(Environment& env, const ArmSet& arms, const AlgoConfig& cfg);

// Oracle variant: the rotation uses the true opinion direction from round 1.
RegretTrace run_oracle_subspace(Environment& env, const ArmSet& arms, const AlgoConfig& cfg);

}  // namespace opdmin
