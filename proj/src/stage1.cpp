#include "opdmin/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

// ---------------------------------------------------------------------------
// Exploration

std::vector<Sample> explore(Environment& env, const ArmSet& arms, long t1, std::uint64_t seed,
                            ExploreMode mode, RegretTrace* trace) {
    if (t1 < 1) throw ConfigError("explore: T1 must be >= 1");
    const int k = arms.size();
    bool with_replacement = mode == ExploreMode::WithReplacement ||
                            (mode == ExploreMode::Auto && t1 > k);

    Rng rng(seed);
    std::vector<Sample> samples;
    samples.reserve(t1);
    if (with_replacement) {
        for (long t = 0; t < t1; ++t) {
            int idx = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k)));
            samples.push_back({idx, env.observe(arms.arms[idx])});
            if (trace) trace->record(idx, env, arms);
        }
    } else {
        // Shuffled round-robin passes; every arm is seen once per pass.
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        long produced = 0;
        while (produced < t1) {
            rng.shuffle(order);
            for (int idx : order) {
                if (produced == t1) break;
                samples.push_back({idx, env.observe(arms.arms[idx])});
                if (trace) trace->record(idx, env, arms);
                ++produced;
            }
        }
    }
    return samples;
}

double lambda_schedule(int n, long t1, double delta, LambdaMode mode, double noise_scale) {
    if (t1 < 1) throw ConfigError("lambda_schedule: T1 must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("lambda_schedule: delta in (0,1)");
    if (noise_scale < 0.0) throw ConfigError("lambda_schedule: noise scale must be >= 0");
    if (mode == LambdaMode::None) return 0.0;
    if (mode == LambdaMode::Theory)
        return noise_scale * 2.0 *
               std::sqrt(2.0 * std::log(2.0 * n / delta) / static_cast<double>(t1));
    double d = static_cast<double>(n) * n;
    return noise_scale * 2.0 / std::sqrt(static_cast<double>(t1)) *
           std::sqrt(std::log(2.0 * d / 1e-2));
}

// ---------------------------------------------------------------------------
// Design operator

DesignOperator::DesignOperator(const ArmSet& arms, std::vector<double> weights)
    : arms_(&arms), weights_(std::move(weights)) {
    for (int i = 0; i < arms.size(); ++i)
        if (weights_[i] != 0.0) active_.push_back(i);
}

DesignOperator DesignOperator::from_samples(const ArmSet& arms,
                                            const std::vector<Sample>& samples) {
    std::vector<double> w(arms.size(), 0.0);
    double inv = 1.0 / static_cast<double>(samples.size());
    for (const Sample& s : samples) w[s.arm] += inv;
    return DesignOperator(arms, std::move(w));
}

DesignOperator DesignOperator::uniform(const ArmSet& arms) {
    std::vector<double> w(arms.size(), 1.0 / static_cast<double>(arms.size()));
    return DesignOperator(arms, std::move(w));
}

void DesignOperator::apply(const SymMatrix& v, SymMatrix& out) const {
    const int n = arms_->n;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> coeff(active_.size());
#pragma omp parallel for schedule(static) if (active_.size() >= 16)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(active_.size()); ++a) {
        int i = active_[a];
        coeff[a] = weights_[i] * SymMatrix::inner(arms_->arms[i].forest, v);
    }
    if (out.n() != n) out = SymMatrix(n);
    double* o = out.data();
    std::fill(o, o + nn, 0.0);
    for (std::size_t a = 0; a < active_.size(); ++a) {
        if (coeff[a] == 0.0) continue;
        kernels::axpy(coeff[a], arms_->arms[active_[a]].forest.data(), o, nn);
    }
}

double DesignOperator::quadratic(const SymMatrix& v) const {
    std::vector<double> terms(active_.size());
#pragma omp parallel for schedule(static) if (active_.size() >= 16)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(active_.size()); ++a) {
        int i = active_[a];
        double ip = SymMatrix::inner(arms_->arms[i].forest, v);
        terms[a] = weights_[i] * ip * ip;
    }
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

double DesignOperator::top_eigenvalue(int iters) const {
    const int n = arms_->n;
    Rng rng(0x70b0e16ULL);
    SymMatrix v(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) v.set(i, j, rng.uniform(-1.0, 1.0));
    double norm = v.frob_norm();
    v *= 1.0 / norm;

    SymMatrix w(n);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        apply(v, w);
        lambda = SymMatrix::inner(v, w);
        double wn = w.frob_norm();
        if (wn == 0.0) return 0.0;
        w *= 1.0 / wn;
        std::swap(v, w);
    }
    return lambda;
}

// ---------------------------------------------------------------------------
// Nuclear-norm regularized least squares by proximal gradient

namespace {

struct SampleStats {
    std::vector<int> arms_used;
    std::vector<double> count;  // per used arm
    std::vector<double> ymean;  // per used arm
    double within_arm_error = 0.0;  // irreducible part of the objective
    double t1 = 0.0;
};

SampleStats collect(const std::vector<Sample>& samples, int k) {
    SampleStats st;
    std::vector<double> count(k, 0.0), ysum(k, 0.0);
    for (const Sample& s : samples) {
        count[s.arm] += 1.0;
        ysum[s.arm] += s.y;
    }
    for (int i = 0; i < k; ++i) {
        if (count[i] > 0.0) {
            st.arms_used.push_back(i);
            st.count.push_back(count[i]);
            st.ymean.push_back(ysum[i] / count[i]);
        }
    }
    st.t1 = static_cast<double>(samples.size());
    // spread of repeated observations around their per-arm mean
    std::vector<double> spread(st.arms_used.size(), 0.0);
    std::vector<int> slot(k, -1);
    for (std::size_t a = 0; a < st.arms_used.size(); ++a) slot[st.arms_used[a]] = static_cast<int>(a);
    for (const Sample& s : samples) {
        double d = s.y - st.ymean[slot[s.arm]];
        spread[slot[s.arm]] += d * d;
    }
    for (double v : spread) st.within_arm_error += v;
    st.within_arm_error /= 2.0 * st.t1;
    return st;
}

// Smooth part (1/(2 T1)) sum_t (Y_t - <X_t, Theta>)^2 from cached per-arm
// inner products, evaluated in residual form so near-exact fits do not lose
// precision to cancellation.
double smooth_objective(const SampleStats& st, const std::vector<double>& inner) {
    double s = 0.0;
    for (std::size_t a = 0; a < st.arms_used.size(); ++a) {
        double r = inner[a] - st.ymean[a];
        s += st.count[a] * r * r;
    }
    return s / (2.0 * st.t1) + st.within_arm_error;
}

void compute_inner(const ArmSet& arms, const SampleStats& st, const SymMatrix& theta,
                   std::vector<double>& inner) {
    inner.resize(st.arms_used.size());
#pragma omp parallel for schedule(static) if (st.arms_used.size() >= 16)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(st.arms_used.size()); ++a)
        inner[a] = SymMatrix::inner(arms.arms[st.arms_used[a]].forest, theta);
}

}  // namespace

ThetaEstimate subspace_from_direction(std::vector<double> direction) {
    double norm = kernels::nrm2(direction.data(), direction.size());
    for (double& x : direction) x /= norm;
    fix_sign(direction);
    ThetaEstimate est;
    est.s_perp = orthonormal_completion(direction);
    est.s_hat = std::move(direction);
    return est;
}

ThetaEstimate estimate_theta(const std::vector<Sample>& samples, const ArmSet& arms,
                             double lambda, const EstimatorOptions& opts) {
    if (samples.empty()) throw ConfigError("estimate_theta: no samples");
    const int n = arms.n;
    SampleStats st = collect(samples, arms.size());

    std::vector<double> op_weights(arms.size(), 0.0);
    for (std::size_t a = 0; a < st.arms_used.size(); ++a)
        op_weights[st.arms_used[a]] = st.count[a] / st.t1;
    DesignOperator design(arms, std::move(op_weights));

    double lip = design.top_eigenvalue();
    double base_step = lip > 0.0 ? 0.95 / lip : 1.0;
    // Backtracking probes longer steps and retreats on an objective increase;
    // the fixed rule stays at the Lipschitz step.
    double step = opts.step_rule == StepRule::Backtracking ? 8.0 * base_step : base_step;
    double step_cap = step;

    SymMatrix theta(n);
    std::vector<double> inner(st.arms_used.size(), 0.0);
    double obj = smooth_objective(st, inner);

    ThetaEstimate est;
    est.lambda_used = lambda;
    est.objective_trace.push_back(obj);

    SymMatrix grad(n), cand(n);
    std::vector<double> next_inner;
    for (long it = 0; it < opts.max_iter; ++it) {
        // gradient of the smooth part: sum_i (c_i / T1) (<X_i,Theta> - ymean_i) X_i
        double* g = grad.data();
        std::fill(g, g + static_cast<std::size_t>(n) * n, 0.0);
        for (std::size_t a = 0; a < st.arms_used.size(); ++a) {
            double coeff = st.count[a] * (inner[a] - st.ymean[a]) / st.t1;
            if (coeff == 0.0) continue;
            kernels::axpy(coeff, arms.arms[st.arms_used[a]].forest.data(), g,
                          static_cast<std::size_t>(n) * n);
        }

        double trial_step = step;
        double new_obj = 0.0;
        SymMatrix theta_next;
        bool at_floor = false;
        for (int halvings = 0;; ++halvings) {
            cand = theta;
            kernels::axpy(-trial_step, grad.data(), cand.data(),
                          static_cast<std::size_t>(n) * n);
            cand.symmetrize();
            double new_nuc = 0.0;
            if (trial_step * lambda > 0.0) {
                std::vector<double> spectrum;
                theta_next = svd_soft_threshold_spectrum(cand, trial_step * lambda, &spectrum);
                for (double lam : spectrum) new_nuc += std::abs(lam);
            } else {
                // zero threshold: the prox step is the identity
                theta_next = cand;
            }
            compute_inner(arms, st, theta_next, next_inner);
            new_obj = smooth_objective(st, next_inner) + lambda * new_nuc;
            if (new_obj <= obj) break;
            // An increase within rounding noise of the current objective
            // means the iteration hit the numerical floor, not a bad step.
            if (new_obj - obj <= 1e-12 * std::max(obj, 1e-300) || halvings >= 30) {
                at_floor = true;
                break;
            }
            trial_step *= 0.5;  // step too long for the local curvature
        }
        if (at_floor) break;  // keep the previous iterate
        step = trial_step;
        if (opts.step_rule == StepRule::Backtracking)
            step = std::min(step * 1.25, step_cap);

        double decrease = obj - new_obj;
        theta = std::move(theta_next);
        inner = next_inner;
        obj = new_obj;
        est.prox_iterations = it + 1;
        est.objective_trace.push_back(obj);
        if (decrease <= opts.tol * std::max(std::abs(obj) + std::abs(decrease), 1e-30)) break;
    }
    est.final_objective = obj;

    theta.symmetrize();
    if (theta.frob_norm() < 1e-12) {
        // Degenerate estimate: fall back to a canonical direction so Stage 2
        // still runs a valid linear bandit.
        est.degenerate = true;
        std::vector<double> e1(n, 0.0);
        e1[0] = 1.0;
        ThetaEstimate fallback = subspace_from_direction(std::move(e1));
        est.s_hat = std::move(fallback.s_hat);
        est.s_perp = std::move(fallback.s_perp);
        est.theta_hat = std::move(theta);
        return est;
    }

    std::pair<double, std::vector<double>> top;
    try {
        top = top_eigvec(theta, 1e-10 * std::max(1.0, theta.frob_norm()));
    } catch (const ConvergenceFailure&) {
        // Power iteration can stall on near-degenerate spectra; the full
        // decomposition settles it.
        EigenDecomp d = sym_eig(theta);
        int arg = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(d.values[j]) > std::abs(d.values[arg])) arg = j;
        top = {d.values[arg], d.eigenvector(arg)};
        fix_sign(top.second);
    }
    est.s_hat = std::move(top.second);
    est.s_perp = orthonormal_completion(est.s_hat);
    est.theta_hat = std::move(theta);
    return est;
}

// ---------------------------------------------------------------------------
// Arm reduction

std::vector<ReducedArm> reduce_armset(const ArmSet& arms, const ThetaEstimate& est) {
    const int n = arms.n;
    if (static_cast<int>(est.s_hat.size()) != n)
        throw DimensionMismatch("reduce_armset: estimate dimension differs from arms");
    // Transposed completion, so each feature block is one contiguous mat-vec.
    Matrix perp_t(n - 1, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n - 1; ++j) perp_t(j, i) = est.s_perp(i, j);

    std::vector<ReducedArm> reduced(arms.size());
#pragma omp parallel for schedule(static)
    for (int a = 0; a < arms.size(); ++a) {
        const Arm& arm = arms.arms[a];
        std::vector<double> u(n);
        kernels::mat_vec(arm.forest.data(), n, n, est.s_hat.data(), u.data());
        std::vector<double> f(2 * n - 1);
        f[0] = kernels::dot(est.s_hat.data(), u.data(), n);
        kernels::mat_vec(perp_t.data(), n - 1, n, u.data(), f.data() + 1);
        std::copy(f.begin() + 1, f.begin() + n, f.begin() + n);
        reduced[a].features = std::move(f);
        reduced[a].original_index = arm.index;
    }
    return reduced;
}

std::vector<double> reduced_theta(const ThetaEstimate& est, const Environment& env) {
    const OpinionVector& s = env.opinions();
    const int n = static_cast<int>(s.size());
    double w = kernels::dot(est.s_hat.data(), s.data(), n);
    std::vector<double> f(2 * n - 1);
    f[0] = w * w;
    for (int j = 0; j < n - 1; ++j) {
        double pj = 0.0;
        for (int i = 0; i < n; ++i) pj += est.s_perp(i, j) * s[i];
        f[1 + j] = w * pj;
        f[n + j] = w * pj;
    }
    return f;
}

}  // namespace opdmin
