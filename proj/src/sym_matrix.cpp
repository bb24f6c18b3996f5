#include "opdmin/sym_matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace opdmin {

bool SymMatrix::is_symmetric(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

void SymMatrix::symmetrize() {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = v;
            (*this)(j, i) = v;
        }
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frob_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double scale) {
    for (double& v : a_) v *= scale;
    return *this;
}

double SymMatrix::inner(const SymMatrix& a, const SymMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.a_.size(); ++i) s += a.a_[i] * b.a_[i];
    return s;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

}  // namespace opdmin
