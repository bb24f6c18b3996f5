#pragma once

#include <utility>
#include <vector>

#include "opdmin/sym_matrix.hpp"

namespace opdmin {

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Supports rank-one updates so a bandit design matrix can be maintained at
// O(d^2) per round instead of refactorizing.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const SymMatrix& a);

    int n() const { return n_; }

    std::vector<double> solve(const std::vector<double>& b) const;
    void solve_in_place(std::vector<double>& b) const;

    // Solves L Y = rhs for a row-major n x k right-hand side, in place.
    // The k-contiguous inner loops vectorize, which is what makes per-round
    // confidence widths over a whole arm set affordable.
    void forward_solve_batch(double* rhs, int k) const;

    // Updates the factor so that it factors A + x x'.
    void rank_one_update(const std::vector<double>& x);

    double log_det() const;  // of the factored matrix A

private:
    int n_ = 0;
    std::vector<double> l_;  // row-major, upper part zero
};

// A X = B for symmetric positive definite A, via Cholesky. Never forms an
// explicit inverse.
Matrix spd_solve(const SymMatrix& a, const Matrix& b);
std::vector<double> spd_solve(const SymMatrix& a, const std::vector<double>& b);

// A^{-1} as a symmetric matrix (solves against the identity and symmetrizes
// the rounding noise away).
SymMatrix spd_solve_identity(const SymMatrix& a);

// Full symmetric eigendecomposition via cyclic Jacobi rotations. Robust and
// accurate at the problem sizes this library targets (n up to ~1100).
EigenDecomp sym_eig(const SymMatrix& a);

// Dominant eigenpair (largest magnitude) by power iteration. The returned
// vector has unit norm and its largest-magnitude entry is positive, ties
// resolved toward the lowest index. Residual stop: ||A v - lambda v|| <= tol.
std::pair<double, std::vector<double>> top_eigvec(const SymMatrix& a, double tol,
                                                  int max_iter = 10000);

// Eigenvalue soft-thresholding: sum_i sign(l_i) max(|l_i| - tau, 0) v_i v_i'.
// For symmetric inputs this is the proximal operator of tau * nuclear norm.
SymMatrix svd_soft_threshold(const SymMatrix& a, double tau);

// Same operation, also reporting the post-threshold spectrum so callers can
// read the nuclear norm off without a second decomposition.
SymMatrix svd_soft_threshold_spectrum(const SymMatrix& a, double tau,
                                      std::vector<double>* spectrum);

// Orthonormal basis of the complement of a unit vector, n x (n-1), built from
// the Householder reflector that maps e1 to v (columns 2..n of the reflector).
Matrix orthonormal_completion(const std::vector<double>& v);

// Applies the shared sign convention in place: largest-magnitude entry
// positive, ties toward the lowest index.
void fix_sign(std::vector<double>& v);

double nuclear_norm(const SymMatrix& a);

}  // namespace opdmin
