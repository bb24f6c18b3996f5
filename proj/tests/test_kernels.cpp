#include <doctest.h>

#include <cmath>
#include <vector>

#include "opdmin/kernels.hpp"
#include "opdmin/parallel.hpp"
#include "opdmin/rng.hpp"

using namespace opdmin;

namespace {
std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}
}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    Rng rng(1234);
    for (std::size_t n : {std::size_t{3}, std::size_t{17}, std::size_t{64}, std::size_t{130}}) {
        std::vector<double> a = random_vec(n * n, rng);
        std::vector<double> b = random_vec(n * n, rng);
        std::vector<double> x = random_vec(n, rng);

        std::vector<double> y1(n), y2(n);
        kernels::mat_vec(a.data(), n, n, x.data(), y1.data());
        ref::mat_vec(a.data(), n, n, x.data(), y2.data());
        CHECK(y1 == y2);

        std::vector<double> c1(n * n), c2(n * n);
        kernels::mat_mul(a.data(), b.data(), c1.data(), n, n, n);
        ref::mat_mul(a.data(), b.data(), c2.data(), n, n, n);
        CHECK(c1 == c2);

        CHECK(kernels::quad_form(a.data(), n, x.data()) ==
              ref::quad_form(a.data(), n, x.data()));
    }
}

TEST_CASE("rectangular mat_vec against a hand-rolled loop") {
    Rng rng(5);
    std::size_t n = 4, m = 7;
    std::vector<double> a = random_vec(n * m, rng);
    std::vector<double> x = random_vec(m, rng);
    std::vector<double> y(n), yr(n);
    kernels::mat_vec(a.data(), n, m, x.data(), y.data());
    ref::mat_vec(a.data(), n, m, x.data(), yr.data());
    CHECK(y == yr);

    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += a[i * m + j] * x[j];
        CHECK(y[i] == doctest::Approx(s).epsilon(1e-15));
    }
}

TEST_CASE("dot, nrm2, axpy basics") {
    std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b{4.0, -5.0, 6.0};
    CHECK(kernels::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
    CHECK(kernels::nrm2(b.data(), 3) == doctest::Approx(std::sqrt(77.0)));
    kernels::axpy(2.0, a.data(), b.data(), 3);
    CHECK(b == std::vector<double>{6.0, -1.0, 12.0});
}
