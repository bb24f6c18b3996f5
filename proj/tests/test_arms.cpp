#include <doctest.h>

#include <cmath>

#include "opdmin/arms.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/rng.hpp"

using namespace opdmin;

namespace {
void check_arm_invariants(const Arm& arm) {
    const int n = arm.forest.n();
    // (I + L) X = I
    SymMatrix shifted = arm.laplacian;
    for (int i = 0; i < n; ++i) shifted(i, i) += 1.0;
    SymMatrix prod(n);
    kernels::mat_mul(shifted.data(), arm.forest.data(), prod.data(), n, n, n);
    for (int i = 0; i < n; ++i) prod(i, i) -= 1.0;
    CHECK(prod.frob_norm() < 1e-8);
    // spectrum in (0, 1]
    EigenDecomp d = sym_eig(arm.forest);
    CHECK(d.values.front() <= 1.0 + 1e-8);
    CHECK(d.values.back() > 0.0);
    // Frobenius bound
    CHECK(arm.forest.frob_norm() <= std::sqrt(static_cast<double>(n)) + 1e-8);
}
}  // namespace

TEST_CASE("single edit on an empty 2-node base gives the closed-form forest") {
    WeightedGraph base{2, {}};
    // a single edit always lands on pair (0,1) at n=2; weight forced to 1
    ArmSet set = perturb_local(base, 1, 1.0, 1.0, 1, 99);
    const Arm& arm = set.arms[0];
    CHECK(arm.laplacian(0, 0) == doctest::Approx(1.0));
    CHECK(arm.laplacian(0, 1) == doctest::Approx(-1.0));
    CHECK(arm.forest(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(arm.forest(0, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("local arms differ from the base and satisfy the arm invariants") {
    Rng rng(4);
    WeightedGraph base = erdos_renyi(10, 0.3, 12);
    SymMatrix base_l = laplacian(base);
    ArmSet set = perturb_local(base, 10, 0.5, 1.5, 8, 71);
    CHECK(set.size() == 8);
    for (const Arm& arm : set.arms) {
        SymMatrix diff = arm.laplacian - base_l;
        CHECK(diff.frob_norm() > 0.0);  // weights at least 0.5 per edit
        check_arm_invariants(arm);
    }
}

TEST_CASE("edge removal mode keeps Laplacians positive semidefinite") {
    WeightedGraph base = erdos_renyi(8, 0.5, 3);
    ArmSet set = perturb_local(base, 12, 0.5, 1.5, 6, 5, /*allow_removal=*/true);
    for (const Arm& arm : set.arms) check_arm_invariants(arm);
}

TEST_CASE("diverse arms with p extremes") {
    GraphParams params;
    params.er_p = 0.0;
    ArmSet empty_arms = generate_diverse(4, 3, params, 9);
    for (const Arm& arm : empty_arms.arms) {
        SymMatrix diff = arm.forest - SymMatrix::identity(4);
        CHECK(diff.frob_norm() < 1e-10);
    }

    params.er_p = 1.0;
    ArmSet complete_arms = generate_diverse(3, 4, params, 9);
    for (int k = 1; k < complete_arms.size(); ++k) {
        SymMatrix diff = complete_arms.arms[k].forest - complete_arms.arms[0].forest;
        CHECK(diff.frob_norm() < 1e-12);
    }
    for (const Arm& arm : complete_arms.arms) check_arm_invariants(arm);
}

TEST_CASE("vectorize layout and norms") {
    WeightedGraph base{2, {}};
    Arm identity_arm = make_arm(SymMatrix(2), 0);
    std::vector<double> v = vectorize(identity_arm);
    CHECK(v == std::vector<double>{1.0, 0.0, 0.0, 1.0});

    ArmSet p2 = perturb_local(base, 1, 1.0, 1.0, 1, 99);
    std::vector<double> vp = vectorize(p2.arms[0]);
    CHECK(vp[0] == doctest::Approx(2.0 / 3.0));
    CHECK(vp[1] == doctest::Approx(1.0 / 3.0));
    CHECK(vp[2] == doctest::Approx(1.0 / 3.0));
    CHECK(vp[3] == doctest::Approx(2.0 / 3.0));

    // |vec|_2 = |X|_F <= sqrt(n)
    double norm = kernels::nrm2(vp.data(), vp.size());
    CHECK(norm == doctest::Approx(p2.arms[0].forest.frob_norm()));
    CHECK(norm <= std::sqrt(2.0) + 1e-12);
}

TEST_CASE("vectorize preserves trace inner products") {
    Rng rng(21);
    GraphParams params;
    ArmSet set = generate_diverse(6, 4, params, 33);
    for (const Arm& arm : set.arms) {
        SymMatrix theta(6);
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j) theta.set(i, j, rng.uniform(-1.0, 1.0));
        std::vector<double> v = vectorize(arm);
        double dot = kernels::dot(v.data(), theta.data(), v.size());
        CHECK(std::abs(dot - SymMatrix::inner(arm.forest, theta)) < 1e-10);
    }
}
