#pragma once

#include <cstddef>
#include <vector>

namespace opdmin {

// Dense kernels shared by the numerics stack. The primary entry points run
// the inner loops under OpenMP where that pays off; each parallel region
// partitions work by output slot (row or entry), so no floating-point
// reduction crosses a thread boundary and results are bit-identical to the
// serial reference for any thread count.
namespace kernels {

// y = A x, A row-major n x m.
void mat_vec(const double* a, std::size_t n, std::size_t m, const double* x, double* y);

// C = A B, A n x k, B k x m, all row-major.
void mat_mul(const double* a, const double* b, double* c,
             std::size_t n, std::size_t k, std::size_t m);

// x' A x for square row-major A.
double quad_form(const double* a, std::size_t n, const double* x);

double dot(const double* x, const double* y, std::size_t n);
double nrm2(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

}  // namespace kernels

// Serial reference implementations, kept for tests and the kernel benchmark.
namespace ref {

void mat_vec(const double* a, std::size_t n, std::size_t m, const double* x, double* y);
void mat_mul(const double* a, const double* b, double* c,
             std::size_t n, std::size_t k, std::size_t m);
double quad_form(const double* a, std::size_t n, const double* x);

}  // namespace ref

}  // namespace opdmin
