#pragma once

#include <cstddef>
#include <vector>

namespace opdmin {

// General rectangular matrix, row-major. Small utility type; heavy lifting
// happens in the kernels.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }

    const double* data() const { return a.data(); }
    double* data() { return a.data(); }
};

// Dense symmetric matrix with full row-major storage. Mutators that touch a
// single triangle exist for hot loops; set()/add() keep both triangles in
// sync and are the default way to build one.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int n() const { return n_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * n_ + j] = v;
        a_[static_cast<std::size_t>(j) * n_ + i] = v;
    }
    void add(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * n_ + j] += v;
        if (i != j) a_[static_cast<std::size_t>(j) * n_ + i] += v;
    }

    const double* data() const { return a_.data(); }
    double* data() { return a_.data(); }

    bool is_symmetric(double tol = 1e-12) const;
    void symmetrize();  // (A + A') / 2

    double trace() const;
    double frob_norm() const;
    double max_abs() const;

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix& operator-=(const SymMatrix& other);
    SymMatrix& operator*=(double scale);

    // Trace inner product <A, B>.
    static double inner(const SymMatrix& a, const SymMatrix& b);

private:
    int n_ = 0;
    std::vector<double> a_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

// Full eigendecomposition, eigenvalues sorted descending, eigenvector j in
// column j of `vectors`.
struct EigenDecomp {
    int n = 0;
    std::vector<double> values;
    std::vector<double> vectors;  // row-major n x n

    double vec(int i, int j) const { return vectors[static_cast<std::size_t>(i) * n + j]; }
    std::vector<double> eigenvector(int j) const {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = vec(i, j);
        return v;
    }
};

}  // namespace opdmin
