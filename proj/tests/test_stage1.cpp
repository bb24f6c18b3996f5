#include <doctest.h>

#include <cmath>
#include <set>

#include "opdmin/environment.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/stage1.hpp"

using namespace opdmin;

namespace {

ArmSet diverse_set(int n, int k, std::uint64_t seed, double p = 0.5) {
    GraphParams params;
    params.er_p = p;
    return generate_diverse(n, k, params, seed);
}

// Normal-equations oracle over an orthonormal basis of symmetric matrices,
// solved by eigenvalue pseudo-inverse. Forest-matrix designs are always rank
// deficient on the full symmetric space (every X has unit row sums), so the
// oracle takes the minimum-norm solution, which is what gradient descent from
// zero converges to as well. Independent of the proximal solver path.
SymMatrix least_squares_oracle(const std::vector<Sample>& samples, const ArmSet& arms) {
    const int n = arms.n;
    std::vector<SymMatrix> basis;
    for (int i = 0; i < n; ++i) {
        SymMatrix b(n);
        b(i, i) = 1.0;
        basis.push_back(b);
    }
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            SymMatrix b(n);
            b.set(i, j, inv_sqrt2);
            basis.push_back(b);
        }
    const int d = static_cast<int>(basis.size());
    SymMatrix normal(d);
    std::vector<double> rhs(d, 0.0);
    for (const Sample& s : samples) {
        std::vector<double> row(d);
        for (int b = 0; b < d; ++b) row[b] = SymMatrix::inner(arms.arms[s.arm].forest, basis[b]);
        for (int a = 0; a < d; ++a) {
            rhs[a] += s.y * row[a];
            for (int b = 0; b < d; ++b) normal(a, b) += row[a] * row[b];
        }
    }
    EigenDecomp eig = sym_eig(normal);
    std::vector<double> coef(d, 0.0);
    for (int r = 0; r < d; ++r) {
        if (eig.values[r] <= 1e-10 * eig.values[0]) continue;
        double proj = 0.0;
        for (int a = 0; a < d; ++a) proj += eig.vec(a, r) * rhs[a];
        proj /= eig.values[r];
        for (int a = 0; a < d; ++a) coef[a] += proj * eig.vec(a, r);
    }
    SymMatrix theta(n);
    for (int b = 0; b < d; ++b) {
        SymMatrix scaled = basis[b];
        scaled *= coef[b];
        theta += scaled;
    }
    return theta;
}

}  // namespace

TEST_CASE("explore pulls only arm 0 when K = 1") {
    ArmSet set = diverse_set(3, 1, 4);
    Environment env({0.5, 0.0, -0.5}, 0.0, 9);
    std::vector<Sample> samples = explore(env, set, 7, 3);
    CHECK(samples.size() == 7);
    for (const Sample& s : samples) CHECK(s.arm == 0);
}

TEST_CASE("explore covers each arm exactly once when T1 = K") {
    ArmSet set = diverse_set(4, 6, 4);
    Environment env(sample_opinions(4, OpinionMode::Uniform, 3), 0.0, 9);
    std::vector<Sample> samples = explore(env, set, 6, 3, ExploreMode::Auto);
    std::set<int> seen;
    for (const Sample& s : samples) seen.insert(s.arm);
    CHECK(seen.size() == 6);
}

TEST_CASE("explore is deterministic in the seed") {
    ArmSet set = diverse_set(4, 5, 4);
    OpinionVector s = sample_opinions(4, OpinionMode::Uniform, 3);
    Environment env_a(s, 0.2, 9), env_b(s, 0.2, 9);
    std::vector<Sample> a = explore(env_a, set, 23, 3, ExploreMode::WithReplacement);
    std::vector<Sample> b = explore(env_b, set, 23, 3, ExploreMode::WithReplacement);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].arm == b[i].arm);
        CHECK(a[i].y == b[i].y);
    }
}

TEST_CASE("lambda_schedule theory value and monotonicity") {
    // independent recomputation of 2 sqrt(2 ln(2n/delta) / T1)
    double expected = 2.0 * std::sqrt(2.0 * std::log(2.0 * 8 / 0.001) / 100.0);
    CHECK(expected == doctest::Approx(0.8800156).epsilon(1e-5));
    CHECK(lambda_schedule(8, 100, 0.001, LambdaMode::Theory) == doctest::Approx(expected));

    CHECK(lambda_schedule(8, 400, 0.001, LambdaMode::Theory) <
          lambda_schedule(8, 100, 0.001, LambdaMode::Theory));
    CHECK(lambda_schedule(8, 100, 1e-6, LambdaMode::Theory) >
          lambda_schedule(8, 100, 1e-3, LambdaMode::Theory));
    CHECK(lambda_schedule(8, 400, 0.001, LambdaMode::Experiment) <
          lambda_schedule(8, 100, 0.001, LambdaMode::Experiment));
}

TEST_CASE("noiseless unregularized estimation recovers the true parameter") {
    const int n = 4;
    ArmSet set = diverse_set(n, 30, 17);
    OpinionVector s = sample_opinions(n, OpinionMode::Uniform, 5);
    Environment env(s, 0.0, 12);
    std::vector<Sample> samples = explore(env, set, 30, 8, ExploreMode::WithoutReplacement);

    EstimatorOptions opts;
    opts.max_iter = 20000;
    opts.tol = 1e-15;
    ThetaEstimate est = estimate_theta(samples, set, 0.0, opts);

    // residuals at the fit are zero
    for (const Sample& smp : samples) {
        double fit = SymMatrix::inner(set.arms[smp.arm].forest, est.theta_hat);
        CHECK(std::abs(fit - smp.y) < 1e-7);
    }

    // the design spans symmetric matrices, so the recovered parameter is s s'
    SymMatrix target(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) target(i, j) = s[i] * s[j];
    SymMatrix diff = est.theta_hat - target;
    CHECK(diff.frob_norm() <= 1e-6);

    // cross-check against the normal-equations oracle
    SymMatrix oracle = least_squares_oracle(samples, set);
    SymMatrix gap = est.theta_hat - oracle;
    CHECK(gap.frob_norm() <= 1e-6);
}

TEST_CASE("all-zero responses give the zero estimate and the degenerate fallback") {
    ArmSet set = diverse_set(4, 6, 9);
    std::vector<Sample> samples;
    for (int i = 0; i < 6; ++i) samples.push_back({i, 0.0});
    ThetaEstimate est = estimate_theta(samples, set, 0.5);
    CHECK(est.theta_hat.frob_norm() < 1e-12);
    CHECK(est.degenerate);
    CHECK(est.s_hat[0] == doctest::Approx(1.0));
}

TEST_CASE("proximal objective is monotone non-increasing") {
    const int n = 6;
    ArmSet set = diverse_set(n, 20, 27);
    OpinionVector s = sample_opinions(n, OpinionMode::Uniform, 15);
    Environment env(s, 0.1, 33);
    std::vector<Sample> samples = explore(env, set, 40, 2);
    ThetaEstimate est = estimate_theta(samples, set, lambda_schedule(n, 40, 0.001,
                                                                     LambdaMode::Experiment));
    REQUIRE(est.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < est.objective_trace.size(); ++i)
        CHECK(est.objective_trace[i] <= est.objective_trace[i - 1] * (1.0 + 1e-12) + 1e-300);
    CHECK(est.final_objective == doctest::Approx(est.objective_trace.back()));
    CHECK(est.prox_iterations > 0);
}

TEST_CASE("reduce_armset maps the identity arm to the unit feature") {
    const int n = 5;
    ArmSet set;
    set.n = n;
    set.arms.push_back(make_arm(SymMatrix(n), 0));  // empty graph: X = I
    OpinionVector s = sample_opinions(n, OpinionMode::Uniform, 21);
    ThetaEstimate est = subspace_from_direction(s);
    std::vector<ReducedArm> reduced = reduce_armset(set, est);
    REQUIRE(reduced.size() == 1);
    REQUIRE(reduced[0].features.size() == 2 * n - 1);
    CHECK(reduced[0].features[0] == doctest::Approx(1.0));
    for (std::size_t j = 1; j < reduced[0].features.size(); ++j)
        CHECK(std::abs(reduced[0].features[j]) < 1e-10);
}

TEST_CASE("reduced feature norms respect the duplicated-block bound") {
    const int n = 6;
    ArmSet set = diverse_set(n, 10, 31);
    ThetaEstimate est = subspace_from_direction(sample_opinions(n, OpinionMode::Uniform, 2));
    for (const ReducedArm& ra : reduce_armset(set, est)) {
        double fnorm = kernels::nrm2(ra.features.data(), ra.features.size());
        CHECK(fnorm <= std::sqrt(2.0) * set.arms[ra.original_index].forest.frob_norm() + 1e-12);
    }
}

TEST_CASE("exact subspace makes reduced inner products match true losses") {
    const int n = 6;
    ArmSet set = diverse_set(n, 12, 41);
    OpinionVector s = sample_opinions(n, OpinionMode::Uniform, 7);
    Environment env(s, 0.0, 3);
    ThetaEstimate est = subspace_from_direction(s);
    std::vector<ReducedArm> reduced = reduce_armset(set, est);
    std::vector<double> theta_sub = reduced_theta(est, env);
    for (const ReducedArm& ra : reduced) {
        double predicted = kernels::dot(ra.features.data(), theta_sub.data(), theta_sub.size());
        CHECK(std::abs(predicted - env.true_loss(set.arms[ra.original_index])) < 1e-10);
    }
}

TEST_CASE("reduced_theta special geometries") {
    const int n = 4;
    OpinionVector s{0.6, -0.2, -0.2, -0.2};
    Environment env(s, 0.0, 3);

    ThetaEstimate aligned = subspace_from_direction(s);
    std::vector<double> f = reduced_theta(aligned, env);
    double s2 = kernels::dot(s.data(), s.data(), s.size());
    CHECK(f[0] == doctest::Approx(s2));
    for (std::size_t j = 1; j < f.size(); ++j) CHECK(std::abs(f[j]) < 1e-12);

    // direction orthogonal to s: first coordinate vanishes
    std::vector<double> orth{0.0, 1.0, -1.0, 0.0};
    ThetaEstimate perp = subspace_from_direction(orth);
    std::vector<double> fp = reduced_theta(perp, env);
    CHECK(std::abs(fp[0]) < 1e-12);
}

TEST_CASE("block decomposition identity on random instances") {
    Rng rng(61);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 5;
        ArmSet set = diverse_set(n, 6, rng.next_u64());
        OpinionVector s = sample_opinions(n, OpinionMode::Uniform, rng.next_u64());
        Environment env(s, 0.0, 1);

        // perturbed direction: mix s with noise so s_hat is deliberately off
        std::vector<double> dir = s;
        for (double& x : dir) x += 0.4 * rng.normal();
        ThetaEstimate est = subspace_from_direction(dir);

        std::vector<ReducedArm> reduced = reduce_armset(set, est);
        std::vector<double> theta_sub = reduced_theta(est, env);
        for (const ReducedArm& ra : reduced) {
            const Arm& arm = set.arms[ra.original_index];
            double head = kernels::dot(ra.features.data(), theta_sub.data(), theta_sub.size());
            // residual block <Sp' X Sp, Sp' Theta* Sp>, assembled brute force
            double tail = 0.0;
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b < n - 1; ++b) {
                    double xab = 0.0, tab = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            xab += est.s_perp(i, a) * arm.forest(i, j) * est.s_perp(j, b);
                            tab += est.s_perp(i, a) * s[i] * s[j] * est.s_perp(j, b);
                        }
                    tail += xab * tab;
                }
            CHECK(std::abs(head + tail - env.true_loss(arm)) < 1e-9);
        }
    }
}

TEST_CASE("subspace sign flip leaves reduced predictions unchanged") {
    const int n = 5;
    ArmSet set = diverse_set(n, 8, 83);
    OpinionVector s = sample_opinions(n, OpinionMode::Uniform, 19);
    Environment env(s, 0.0, 1);

    ThetaEstimate plus = subspace_from_direction(s);
    ThetaEstimate minus;  // same direction, flipped sign, bypassing the sign convention
    minus.s_hat = plus.s_hat;
    for (double& x : minus.s_hat) x = -x;
    minus.s_perp = orthonormal_completion(minus.s_hat);

    std::vector<ReducedArm> rp = reduce_armset(set, plus);
    std::vector<ReducedArm> rm = reduce_armset(set, minus);
    std::vector<double> tp = reduced_theta(plus, env);
    std::vector<double> tm = reduced_theta(minus, env);
    for (int a = 0; a < set.size(); ++a) {
        CHECK(std::abs(std::abs(rp[a].features[0]) - std::abs(rm[a].features[0])) < 1e-12);
        double pred_p = kernels::dot(rp[a].features.data(), tp.data(), tp.size());
        double pred_m = kernels::dot(rm[a].features.data(), tm.data(), tm.size());
        CHECK(pred_p == doctest::Approx(pred_m).epsilon(1e-10));
    }
}

TEST_CASE("subspace misalignment obeys the perturbation bound") {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 8;
        ArmSet set = diverse_set(n, 40, rng.next_u64(), 0.3);
        OpinionVector s = sample_opinions(n, OpinionMode::Uniform, rng.next_u64());
        Environment env(s, 0.05, rng.next_u64());
        std::vector<Sample> samples = explore(env, set, 160, rng.next_u64());
        ThetaEstimate est = estimate_theta(
            samples, set, lambda_schedule(n, 160, 0.001, LambdaMode::Experiment, 0.05));

        SymMatrix err = est.theta_hat;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) err(i, j) -= s[i] * s[j];

        // |Sp' s| * |s| <= |Theta_hat - Theta*|_F
        double snorm = kernels::nrm2(s.data(), s.size());
        double proj = 0.0;
        for (int j = 0; j < n - 1; ++j) {
            double pj = 0.0;
            for (int i = 0; i < n; ++i) pj += est.s_perp(i, j) * s[i];
            proj += pj * pj;
        }
        CHECK(std::sqrt(proj) * snorm <= err.frob_norm() + 1e-9);
    }
}
