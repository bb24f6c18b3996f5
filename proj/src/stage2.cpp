#include "opdmin/stage2.hpp"

#include <chrono>
#include <cmath>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"

namespace opdmin {

namespace {
double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}
}  // namespace

FeatureSet FeatureSet::from(const std::vector<ReducedArm>& arms) {
    FeatureSet f;
    f.k = static_cast<int>(arms.size());
    f.d = static_cast<int>(arms.front().features.size());
    f.rows.resize(static_cast<std::size_t>(f.k) * f.d);
    f.cols.resize(static_cast<std::size_t>(f.k) * f.d);
    for (int i = 0; i < f.k; ++i)
        for (int j = 0; j < f.d; ++j) {
            double v = arms[i].features[j];
            f.rows[static_cast<std::size_t>(i) * f.d + j] = v;
            f.cols[static_cast<std::size_t>(j) * f.k + i] = v;
        }
    return f;
}

FeatureSet FeatureSet::from_raw(const std::vector<std::vector<double>>& feats) {
    FeatureSet f;
    f.k = static_cast<int>(feats.size());
    f.d = static_cast<int>(feats.front().size());
    f.rows.resize(static_cast<std::size_t>(f.k) * f.d);
    f.cols.resize(static_cast<std::size_t>(f.k) * f.d);
    for (int i = 0; i < f.k; ++i)
        for (int j = 0; j < f.d; ++j) {
            double v = feats[i][j];
            f.rows[static_cast<std::size_t>(i) * f.d + j] = v;
            f.cols[static_cast<std::size_t>(j) * f.k + i] = v;
        }
    return f;
}

namespace {
SymMatrix ridge_identity(int d, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("oful: lambda_reg must be positive");
    SymMatrix m(d);
    for (int i = 0; i < d; ++i) m(i, i) = lambda;
    return m;
}
}  // namespace

BanditState::BanditState(int d, const OfulOptions& opts)
    : d_(d), opts_(opts), a_(ridge_identity(d, opts.lambda_reg)), b_(d, 0.0), chol_(a_) {}

double BanditState::beta() const {
    if (opts_.beta_override >= 0.0) return opts_.beta_override;
    double tail;
    if (opts_.beta_form == BetaForm::Determinant) {
        double logdet = chol_.log_det();
        tail = logdet - d_ * std::log(opts_.lambda_reg) + 2.0 * std::log(1.0 / opts_.delta);
    } else {
        double lx2 = opts_.lx_bound * opts_.lx_bound;
        tail = d_ * std::log((1.0 + static_cast<double>(t_) * lx2 / opts_.lambda_reg) /
                             opts_.delta);
    }
    return opts_.sigma * std::sqrt(std::max(tail, 0.0)) +
           std::sqrt(opts_.lambda_reg) * opts_.s_bound;
}

std::vector<double> BanditState::theta_hat() const { return chol_.solve(b_); }

double BanditState::ellipsoid_norm(const std::vector<double>& v) const {
    // |v|_{A^{-1}} = |L^{-1} v|
    std::vector<double> y = v;
    chol_.forward_solve_batch(y.data(), 1);
    return kernels::nrm2(y.data(), y.size());
}

int BanditState::select(const FeatureSet& features) {
    if (features.d != d_) throw DimensionMismatch("oful select: feature dimension differs");
    const int k = features.k;

    std::vector<double> theta = theta_hat();
    // Residual monitor on the maintained factorization.
    {
        std::vector<double> r(d_);
        kernels::mat_vec(a_.data(), d_, d_, theta.data(), r.data());
        double num = 0.0;
        for (int i = 0; i < d_; ++i) {
            double e = r[i] - b_[i];
            num += e * e;
        }
        double denom = std::max(1.0, kernels::nrm2(b_.data(), b_.size()));
        double res = std::sqrt(num) / denom;
        if (res > max_residual_) max_residual_ = res;
        if (res > 1e-8) {
            refactor();
            theta = theta_hat();
        }
    }

    workspace_.assign(features.cols.begin(), features.cols.end());
    chol_.forward_solve_batch(workspace_.data(), k);
    std::vector<double> width2(k, 0.0);
    for (int i = 0; i < d_; ++i) {
        const double* row = workspace_.data() + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) width2[j] += row[j] * row[j];
    }

    double bt = beta();
    int best = 0;
    double best_value = 0.0;
    for (int j = 0; j < k; ++j) {
        double mean = kernels::dot(features.row(j), theta.data(), d_);
        double value = mean - bt * std::sqrt(std::max(width2[j], 0.0));
        if (j == 0 || value < best_value) {
            best_value = value;
            best = j;
        }
    }
    return best;
}

void BanditState::update(const double* x, double y) {
    for (int i = 0; i < d_; ++i) {
        double xi = x[i];
        b_[i] += y * xi;
        double* row = a_.data() + static_cast<std::size_t>(i) * d_;
        for (int j = 0; j < d_; ++j) row[j] += xi * x[j];
    }
    std::vector<double> xv(x, x + d_);
    chol_.rank_one_update(xv);
    ++t_;
    if (++updates_since_refactor_ >= opts_.refactor_interval) refactor();
}

void BanditState::refactor() {
    chol_ = CholeskyFactor(a_);
    updates_since_refactor_ = 0;
}

// ---------------------------------------------------------------------------
// Runners

namespace {

RegretTrace run_oful_over(Environment& env, const ArmSet& arms, const FeatureSet& features,
                          const std::vector<int>& original_index, const AlgoConfig& cfg,
                          OfulOptions opts, long first_round, RegretTrace trace,
                          const std::vector<Sample>* warm_start,
                          const std::vector<ReducedArm>* warm_features) {
    BanditState state(features.d, opts);
    if (warm_start && warm_features) {
        for (const Sample& s : *warm_start)
            state.update((*warm_features)[s.arm].features.data(), s.y);
    }
    for (long t = first_round; t <= cfg.horizon; ++t) {
        int j = state.select(features);
        int arm = original_index[j];
        double y = env.observe(arms.arms[arm]);
        trace.record(arm, env, arms);
        state.update(features.row(j), y);
    }
    return trace;
}

std::vector<int> identity_index(int k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    return idx;
}

}  // namespace

RegretTrace run_estr(Environment& env, const ArmSet& arms, const AlgoConfig& cfg) {
    if (cfg.horizon < cfg.t1 || cfg.t1 < 1)
        throw ConfigError("run_estr: need T >= T1 >= 1");
    auto start = std::chrono::steady_clock::now();

    RegretTrace trace;
    std::vector<Sample> samples =
        explore(env, arms, cfg.t1, cfg.algo_seed, cfg.explore_mode, &trace);
    double lambda = lambda_schedule(arms.n, cfg.t1, cfg.delta, cfg.lambda_mode, env.sigma());
    ThetaEstimate est = estimate_theta(samples, arms, lambda, cfg.estimator);
    std::vector<ReducedArm> reduced = reduce_armset(arms, est);
    if (cfg.stage1_out) *cfg.stage1_out = est;
    double stage1 = seconds_since(start);

    const int n = arms.n;
    OfulOptions opts;
    opts.lambda_reg = cfg.lambda_reg;
    opts.s_bound = static_cast<double>(n);
    opts.lx_bound = std::sqrt(2.0) * std::sqrt(static_cast<double>(n));
    opts.sigma = env.sigma();
    opts.delta = cfg.delta;
    opts.beta_form = cfg.beta_form;
    opts.beta_override = cfg.beta_override;

    FeatureSet features = FeatureSet::from(reduced);
    std::vector<int> index(reduced.size());
    for (std::size_t i = 0; i < reduced.size(); ++i) index[i] = reduced[i].original_index;

    trace = run_oful_over(env, arms, features, index, cfg, opts, cfg.t1 + 1, std::move(trace),
                          cfg.reuse_stage1 ? &samples : nullptr,
                          cfg.reuse_stage1 ? &reduced : nullptr);
    trace.stage1_seconds = stage1;
    trace.total_seconds = seconds_since(start);
    trace.stage2_seconds = trace.total_seconds - stage1;
    return trace;
}

RegretTrace run_full_oful(Environment& env, const ArmSet& arms, const AlgoConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    const int n = arms.n;

    std::vector<std::vector<double>> feats(arms.size());
    for (int i = 0; i < arms.size(); ++i) feats[i] = vectorize(arms.arms[i]);
    FeatureSet features = FeatureSet::from_raw(feats);

    OfulOptions opts;
    opts.lambda_reg = cfg.lambda_reg;
    opts.s_bound = static_cast<double>(n);
    opts.lx_bound = cfg.lx_mode == LxMode::SqrtN ? std::sqrt(static_cast<double>(n))
                                                 : static_cast<double>(n);
    opts.sigma = env.sigma();
    opts.delta = cfg.delta;
    opts.beta_form = cfg.beta_form;
    opts.beta_override = cfg.beta_override;

    RegretTrace trace = run_oful_over(env, arms, features, identity_index(arms.size()), cfg,
                                      opts, 1, RegretTrace(), nullptr, nullptr);
    trace.total_seconds = seconds_since(start);
    trace.stage2_seconds = trace.total_seconds;
    return trace;
}

RegretTrace run_oracle_subspace(Environment& env, const ArmSet& arms, const AlgoConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    const int n = arms.n;

    ThetaEstimate est = subspace_from_direction(env.opinions());
    std::vector<ReducedArm> reduced = reduce_armset(arms, est);
    if (cfg.stage1_out) *cfg.stage1_out = est;

    OfulOptions opts;
    opts.lambda_reg = cfg.lambda_reg;
    opts.s_bound = static_cast<double>(n);
    opts.lx_bound = std::sqrt(2.0) * std::sqrt(static_cast<double>(n));
    opts.sigma = env.sigma();
    opts.delta = cfg.delta;
    opts.beta_form = cfg.beta_form;
    opts.beta_override = cfg.beta_override;

    FeatureSet features = FeatureSet::from(reduced);
    std::vector<int> index(reduced.size());
    for (std::size_t i = 0; i < reduced.size(); ++i) index[i] = reduced[i].original_index;

    RegretTrace trace = run_oful_over(env, arms, features, index, cfg, opts, 1, RegretTrace(),
                                      nullptr, nullptr);
    trace.total_seconds = seconds_since(start);
    trace.stage2_seconds = trace.total_seconds;
    return trace;
}

}  // namespace opdmin
