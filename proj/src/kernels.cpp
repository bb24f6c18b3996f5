#include "opdmin/kernels.hpp"

#include <cmath>

namespace opdmin {
namespace kernels {

namespace {
// Below this many output rows the OpenMP fork overhead dominates.
constexpr std::size_t kParallelRowCutoff = 64;
}

void mat_vec(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
#pragma omp parallel for schedule(static) if (n >= kParallelRowCutoff)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double* row = a + static_cast<std::size_t>(i) * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void mat_mul(const double* a, const double* b, double* c,
             std::size_t n, std::size_t k, std::size_t m) {
#pragma omp parallel for schedule(static) if (n >= kParallelRowCutoff)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        double* crow = c + static_cast<std::size_t>(i) * m;
        const double* arow = a + static_cast<std::size_t>(i) * k;
        for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b + l * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

double quad_form(const double* a, std::size_t n, const double* x) {
    // Row contributions land in per-row slots; the final sum is serial so the
    // result does not depend on the thread count.
    std::vector<double> rows(n);
#pragma omp parallel for schedule(static) if (n >= kParallelRowCutoff)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double* row = a + static_cast<std::size_t>(i) * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        rows[i] = acc * x[i];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += rows[i];
    return total;
}

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double nrm2(const double* x, std::size_t n) { return std::sqrt(dot(x, x, n)); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace kernels

namespace ref {

void mat_vec(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void mat_mul(const double* a, const double* b, double* c,
             std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = c + i * m;
        const double* arow = a + i * k;
        for (std::size_t j = 0; j < m; ++j) crow[j] = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b + l * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

double quad_form(const double* a, std::size_t n, const double* x) {
    std::vector<double> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        rows[i] = acc * x[i];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += rows[i];
    return total;
}

}  // namespace ref
}  // namespace opdmin
