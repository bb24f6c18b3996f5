#pragma once

#include <cstdint>
#include <vector>

#include "opdmin/arms.hpp"
#include "opdmin/environment.hpp"
#include "opdmin/numerics.hpp"

namespace opdmin {

struct Sample {
    int arm;
    double y;
};

enum class ExploreMode {
    Auto,             // with replacement when T1 > K, round-robin passes otherwise
    WithReplacement,  // i.i.d. uniform draws, matching the recovery analysis
    WithoutReplacement
};

// Nuclear-penalty schedule for Stage 1. None disables the penalty: on
// low-diversity (nearly collinear) action sets the penalized optimum puts its
// mass on the strong common directions and loses the opinion direction
// entirely, while the capped proximal iteration count already regularizes the
// unpenalized fit. Theory and Experiment follow the published schedules and
// are the right choice when the arm set carries real curvature.
enum class LambdaMode { None, Theory, Experiment };

enum class StepRule { FixedLipschitz, Backtracking };

struct EstimatorOptions {
    StepRule step_rule = StepRule::FixedLipschitz;
    long max_iter = 5000;
    double tol = 1e-9;  // relative objective decrease
};

// Stage-1 output: the regularized estimate, its dominant eigenvector, and the
// orthonormal completion used to rotate arms.
struct ThetaEstimate {
    SymMatrix theta_hat;
    std::vector<double> s_hat;  // unit vector
    Matrix s_perp;              // n x (n-1)
    double lambda_used = 0.0;
    long prox_iterations = 0;
    double final_objective = 0.0;
    bool degenerate = false;               // estimate collapsed to zero; s_hat fell back to e1
    std::vector<double> objective_trace;   // per-iteration objective values
};

struct ReducedArm {
    std::vector<double> features;  // length 2n-1
    int original_index = 0;
};

// Uniform exploration pulls. Regret is recorded into `trace` when provided.
std::vector<Sample> explore(Environment& env, const ArmSet& arms, long t1, std::uint64_t seed,
                            ExploreMode mode = ExploreMode::Auto, RegretTrace* trace = nullptr);

// Regularization schedule. Theory mode follows the high-probability bound;
// experiment mode is the schedule used for the headline runs and treats the
// vectorized dimension d = n^2 with a fixed 1e-2 confidence argument.
// Both scale linearly with the noise level: the penalty has to dominate the
// operator norm of the gradient at the truth, (1/T1) sum eta_t X_t, and that
// norm carries sigma. noise_scale = 1 reproduces the unit-noise formulas.
double lambda_schedule(int n, long t1, double delta, LambdaMode mode,
                       double noise_scale = 1.0);

// Minimizes (1/(2 T1)) sum_t (Y_t - <X_t, Theta>)^2 + lambda |Theta|_nuc by
// proximal gradient with eigenvalue soft-thresholding as the prox step.
ThetaEstimate estimate_theta(const std::vector<Sample>& samples, const ArmSet& arms,
                             double lambda, const EstimatorOptions& opts = {});

// Builds the rotated 2n-1 dimensional features [s'Xs ; Sp'Xs ; (s'XSp)'] for
// every arm without materializing any rotated matrix. For symmetric X the two
// off-diagonal blocks coincide; both copies are kept to preserve the layout.
std::vector<ReducedArm> reduce_armset(const ArmSet& arms, const ThetaEstimate& est);

// Test-only oracle: the projection of the hidden rank-one parameter onto the
// same 2n-1 dimensional layout. Uses the environment's hidden opinions.
std::vector<double> reduced_theta(const ThetaEstimate& est, const Environment& env);

// Builds a ThetaEstimate directly from a known direction (oracle variants and
// degenerate fallbacks share this path).
ThetaEstimate subspace_from_direction(std::vector<double> direction);

// Weighted second-moment operator of vectorized arms,
// H(V) = sum_i w_i <X_i, V> X_i. Shared by the estimator's Lipschitz bound
// and the curvature diagnostics.
class DesignOperator {
public:
    DesignOperator(const ArmSet& arms, std::vector<double> weights);

    static DesignOperator from_samples(const ArmSet& arms, const std::vector<Sample>& samples);
    static DesignOperator uniform(const ArmSet& arms);

    void apply(const SymMatrix& v, SymMatrix& out) const;
    double quadratic(const SymMatrix& v) const;  // sum_i w_i <X_i, V>^2
    double top_eigenvalue(int iters = 120) const;

    const std::vector<double>& weights() const { return weights_; }

private:
    const ArmSet* arms_;
    std::vector<double> weights_;  // per arm, zero for unused arms
    std::vector<int> active_;      // arms with nonzero weight
};

}  // namespace opdmin
