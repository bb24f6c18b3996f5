// Times the OpenMP kernels against their serial references and reports the
// largest observed deviation alongside the speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opdmin/kernels.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/parallel.hpp"
#include "opdmin/rng.hpp"
#include "opdmin/sym_matrix.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_call(int reps, const std::function<void()>& fn) {
    fn();  // warm up
    auto start = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    return std::chrono::duration<double>(Clock::now() - start).count() / reps;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel benchmark: OpenMP vs serial reference"};
    std::vector<int> sizes = {128, 256, 512};
    int reps = 5;
    int threads = 0;
    app.add_option("--sizes", sizes, "matrix sizes")->delimiter(',');
    app.add_option("--reps", reps, "repetitions per measurement");
    app.add_option("--threads", threads, "thread count (0 = default)");
    CLI11_PARSE(app, argc, argv);

    opdmin::set_num_threads(threads);
    std::printf("threads: %d\n", opdmin::max_threads());
    std::printf("%-12s %6s %12s %12s %9s %12s\n", "kernel", "n", "serial_ms", "parallel_ms",
                "speedup", "max_diff");

    for (int n : sizes) {
        opdmin::Rng rng(42);
        std::size_t nn = static_cast<std::size_t>(n) * n;
        std::vector<double> a(nn), b(nn), x(n);
        for (double& v : a) v = rng.uniform(-1.0, 1.0);
        for (double& v : b) v = rng.uniform(-1.0, 1.0);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);

        {
            std::vector<double> y1(n), y2(n);
            double ts = time_call(reps, [&] { opdmin::ref::mat_vec(a.data(), n, n, x.data(), y1.data()); });
            double tp = time_call(reps, [&] { opdmin::kernels::mat_vec(a.data(), n, n, x.data(), y2.data()); });
            std::printf("%-12s %6d %12.4f %12.4f %9.2f %12.3e\n", "mat_vec", n, ts * 1e3,
                        tp * 1e3, ts / tp, max_abs_diff(y1, y2));
        }
        {
            std::vector<double> c1(nn), c2(nn);
            double ts = time_call(reps, [&] { opdmin::ref::mat_mul(a.data(), b.data(), c1.data(), n, n, n); });
            double tp = time_call(reps, [&] { opdmin::kernels::mat_mul(a.data(), b.data(), c2.data(), n, n, n); });
            std::printf("%-12s %6d %12.4f %12.4f %9.2f %12.3e\n", "mat_mul", n, ts * 1e3,
                        tp * 1e3, ts / tp, max_abs_diff(c1, c2));
        }
        {
            double r1 = 0.0, r2 = 0.0;
            double ts = time_call(reps, [&] { r1 = opdmin::ref::quad_form(a.data(), n, x.data()); });
            double tp = time_call(reps, [&] { r2 = opdmin::kernels::quad_form(a.data(), n, x.data()); });
            std::printf("%-12s %6d %12.4f %12.4f %9.2f %12.3e\n", "quad_form", n, ts * 1e3,
                        tp * 1e3, ts / tp, std::abs(r1 - r2));
        }
        {
            // Symmetric eigensolve; the rotation loops parallelize internally.
            opdmin::SymMatrix s(n);
            opdmin::Rng srng(7);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) s.set(i, j, srng.uniform(-1.0, 1.0));
            int eig_reps = std::max(1, reps / 5);
            double tp = time_call(eig_reps, [&] { opdmin::sym_eig(s); });
            std::printf("%-12s %6d %12s %12.4f %9s %12s\n", "sym_eig", n, "-", tp * 1e3, "-",
                        "-");
        }
    }
    return 0;
}
