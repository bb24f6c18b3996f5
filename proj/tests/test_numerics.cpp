#include <doctest.h>

#include <cmath>
#include <vector>

#include "opdmin/errors.hpp"
#include "opdmin/graph.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/rng.hpp"

using namespace opdmin;

namespace {

SymMatrix random_sym(int n, Rng& rng, double scale = 1.0) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, scale * rng.uniform(-1.0, 1.0));
    return m;
}

SymMatrix random_spd(int n, Rng& rng) {
    SymMatrix m = random_sym(n, rng);
    SymMatrix spd(n);
    // m m' + n I is comfortably positive definite
    kernels::mat_mul(m.data(), m.data(), spd.data(), n, n, n);
    spd.symmetrize();
    for (int i = 0; i < n; ++i) spd(i, i) += n;
    return spd;
}

double reconstruction_error(const SymMatrix& a, const EigenDecomp& d) {
    int n = a.n();
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += d.values[r] * d.vec(i, r) * d.vec(j, r);
            double e = s - a(i, j);
            err += e * e;
        }
    return std::sqrt(err);
}

}  // namespace

TEST_CASE("spd_solve identity and diagonal cases") {
    SymMatrix i2 = SymMatrix::identity(2);
    Matrix b(2, 2);
    b(0, 0) = 1.0;
    b(1, 1) = 1.0;
    Matrix x = spd_solve(i2, b);
    CHECK(x(0, 0) == doctest::Approx(1.0));
    CHECK(x(0, 1) == doctest::Approx(0.0));
    CHECK(x(1, 1) == doctest::Approx(1.0));

    SymMatrix d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    Matrix xd = spd_solve(d, b);
    CHECK(xd(0, 0) == doctest::Approx(0.5));
    CHECK(xd(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("spd_solve vector case verified by direct multiplication") {
    SymMatrix a(2);
    a.set(0, 0, 2.0);
    a.set(1, 1, 2.0);
    a.set(0, 1, -1.0);
    std::vector<double> b{1.0, 1.0};
    std::vector<double> x = spd_solve(a, b);
    // verify A x = b
    std::vector<double> ax(2);
    kernels::mat_vec(a.data(), 2, 2, x.data(), ax.data());
    CHECK(ax[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ax[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spd_solve residual on random instances") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(14));
        SymMatrix a = random_spd(n, rng);
        Matrix b(n, 3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 3; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
        Matrix x = spd_solve(a, b);
        double resid = 0.0, scale = 0.0;
        for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += a(i, k) * x(k, j);
                double e = s - b(i, j);
                resid += e * e;
                scale += b(i, j) * b(i, j);
            }
        }
        CHECK(std::sqrt(resid) <= 1e-10 * std::max(1.0, std::sqrt(scale)));
    }
}

TEST_CASE("spd_solve rejects non positive definite input") {
    SymMatrix a(2);
    a.set(0, 0, 1.0);
    a.set(1, 1, -1.0);
    std::vector<double> b{1.0, 1.0};
    CHECK_THROWS_AS(spd_solve(a, b), NotPositiveDefinite);
}

TEST_CASE("sym_eig on identity and diagonal") {
    EigenDecomp d = sym_eig(SymMatrix::identity(3));
    for (double v : d.values) CHECK(v == doctest::Approx(1.0));

    SymMatrix diag(2);
    diag(0, 0) = 3.0;
    diag(1, 1) = 1.0;
    EigenDecomp dd = sym_eig(diag);
    CHECK(dd.values[0] == doctest::Approx(3.0));
    CHECK(dd.values[1] == doctest::Approx(1.0));
    CHECK(std::abs(dd.vec(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(dd.vec(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig hand-solved 2x2 exchange matrix") {
    // characteristic polynomial x^2 - 1: eigenvalues +-1,
    // eigenvectors (1,1)/sqrt(2) and (1,-1)/sqrt(2)
    SymMatrix a(2);
    a.set(0, 1, 1.0);
    EigenDecomp d = sym_eig(a);
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(d.values[0] == doctest::Approx(1.0));
    CHECK(d.values[1] == doctest::Approx(-1.0));
    CHECK(d.vec(0, 0) == doctest::Approx(inv_sqrt2));
    CHECK(d.vec(1, 0) == doctest::Approx(inv_sqrt2));
    CHECK(d.vec(0, 1) == doctest::Approx(inv_sqrt2));
    CHECK(d.vec(1, 1) == doctest::Approx(-inv_sqrt2));
}

TEST_CASE("sym_eig invariants on random matrices") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(20));
        SymMatrix a = random_sym(n, rng, 2.0);
        EigenDecomp d = sym_eig(a);
        for (int i = 0; i + 1 < n; ++i) CHECK(d.values[i] >= d.values[i + 1]);
        // pairwise orthonormality
        for (int p = 0; p < n; ++p)
            for (int q = p; q < n; ++q) {
                double ip = 0.0;
                for (int i = 0; i < n; ++i) ip += d.vec(i, p) * d.vec(i, q);
                CHECK(std::abs(ip - (p == q ? 1.0 : 0.0)) < 1e-8);
            }
        CHECK(reconstruction_error(a, d) < 1e-8);
    }
}

TEST_CASE("top_eigvec trivial and rank-one cases") {
    SymMatrix d(3);
    d(0, 0) = 5.0;
    d(1, 1) = 1.0;
    d(2, 2) = 1.0;
    auto [lam, v] = top_eigvec(d, 1e-10);
    CHECK(lam == doctest::Approx(5.0));
    CHECK(v[0] == doctest::Approx(1.0));

    // s s' with s = (1,-1)/sqrt(2): dominant pair (1, +-s); sign convention
    // makes the first entry positive
    SymMatrix ss(2);
    ss.set(0, 0, 0.5);
    ss.set(1, 1, 0.5);
    ss.set(0, 1, -0.5);
    auto [l2, v2] = top_eigvec(ss, 1e-12);
    CHECK(l2 == doctest::Approx(1.0));
    CHECK(v2[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(v2[1] == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("top_eigvec agrees with sym_eig on a seeded 4x4") {
    Rng rng(42);
    SymMatrix a = random_sym(4, rng);
    // make one eigenvalue clearly dominant so power iteration has a gap
    for (int i = 0; i < 4; ++i) a(i, i) += 3.0;
    auto [lam, v] = top_eigvec(a, 1e-10);
    EigenDecomp d = sym_eig(a);
    int arg = 0;
    for (int j = 1; j < 4; ++j)
        if (std::abs(d.values[j]) > std::abs(d.values[arg])) arg = j;
    CHECK(lam == doctest::Approx(d.values[arg]).epsilon(1e-8));
    std::vector<double> ref_vec = d.eigenvector(arg);
    for (int i = 0; i < 4; ++i) CHECK(v[i] == doctest::Approx(ref_vec[i]).epsilon(1e-6));
}

TEST_CASE("svd_soft_threshold diagonal examples") {
    SymMatrix a(2);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    SymMatrix t = svd_soft_threshold(a, 2.0);
    CHECK(t(0, 0) == doctest::Approx(1.0));
    CHECK(t(1, 1) == doctest::Approx(0.0));

    // negative eigenvalue with magnitude below tau is zeroed
    SymMatrix b(2);
    b(0, 0) = 3.0;
    b(1, 1) = -1.0;
    SymMatrix tb = svd_soft_threshold(b, 2.0);
    CHECK(tb(0, 0) == doctest::Approx(1.0));
    CHECK(tb(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("svd_soft_threshold with tau zero is the identity map") {
    Rng rng(13);
    SymMatrix a = random_sym(6, rng);
    SymMatrix t = svd_soft_threshold(a, 0.0);
    t -= a;
    CHECK(t.frob_norm() < 1e-8);
}

TEST_CASE("svd_soft_threshold is non-expansive") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        SymMatrix a = random_sym(5, rng, 2.0);
        SymMatrix b = random_sym(5, rng, 2.0);
        double tau = rng.uniform(0.0, 1.5);
        SymMatrix ta = svd_soft_threshold(a, tau);
        SymMatrix tb = svd_soft_threshold(b, tau);
        ta -= tb;
        SymMatrix ab = a - b;
        CHECK(ta.frob_norm() <= ab.frob_norm() + 1e-10);
    }
}

TEST_CASE("orthonormal_completion axis and 2d cases") {
    std::vector<double> e1{1.0, 0.0, 0.0};
    Matrix q = orthonormal_completion(e1);
    REQUIRE(q.rows == 3);
    REQUIRE(q.cols == 2);
    // columns span {e2, e3}: first row must vanish
    CHECK(std::abs(q(0, 0)) < 1e-12);
    CHECK(std::abs(q(0, 1)) < 1e-12);

    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<double> v{inv_sqrt2, inv_sqrt2};
    Matrix q2 = orthonormal_completion(v);
    REQUIRE(q2.cols == 1);
    CHECK(std::abs(q2(0, 0)) == doctest::Approx(inv_sqrt2));
    CHECK(q2(0, 0) * q2(1, 0) < 0.0);  // +-(1,-1)/sqrt(2)
}

TEST_CASE("orthonormal_completion produces an orthogonal square matrix") {
    Rng rng(77);
    std::vector<double> v(5);
    for (double& x : v) x = rng.normal();
    double norm = kernels::nrm2(v.data(), v.size());
    for (double& x : v) x /= norm;
    Matrix q = orthonormal_completion(v);

    // assemble Q = [v, q] and check Q'Q = I numerically
    int n = 5;
    std::vector<std::vector<double>> cols;
    cols.push_back(v);
    for (int j = 0; j < n - 1; ++j) {
        std::vector<double> c(n);
        for (int i = 0; i < n; ++i) c[i] = q(i, j);
        cols.push_back(c);
    }
    double err = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double ip = kernels::dot(cols[a].data(), cols[b].data(), n);
            double e = ip - (a == b ? 1.0 : 0.0);
            err += e * e;
        }
    CHECK(std::sqrt(err) <= 1e-9);
}

TEST_CASE("orthonormal_completion rejects non-unit input") {
    std::vector<double> v{1.0, 1.0};
    CHECK_THROWS_AS(orthonormal_completion(v), NotUnitVector);
}

TEST_CASE("forest matrices of graph Laplacians have eigenvalues in (0,1]") {
    Rng rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        WeightedGraph g = erdos_renyi(10, 0.3, rng.next_u64());
        SymMatrix l = laplacian(g);
        for (int i = 0; i < l.n(); ++i) l(i, i) += 1.0;
        SymMatrix x = spd_solve_identity(l);
        EigenDecomp d = sym_eig(x);
        CHECK(d.values.front() <= 1.0 + 1e-8);
        CHECK(d.values.back() > 0.0);
    }
}

TEST_CASE("cholesky rank-one update matches refactorization") {
    Rng rng(8);
    int n = 12;
    SymMatrix a = random_spd(n, rng);
    CholeskyFactor f(a);
    for (int round = 0; round < 5; ++round) {
        std::vector<double> x(n);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        f.rank_one_update(x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) += x[i] * x[j];
    }
    CholeskyFactor fresh(a);
    std::vector<double> b(n);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);
    std::vector<double> x1 = f.solve(b);
    std::vector<double> x2 = fresh.solve(b);
    for (int i = 0; i < n; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-9));
    CHECK(f.log_det() == doctest::Approx(fresh.log_det()).epsilon(1e-10));
}
