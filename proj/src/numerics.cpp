#include "opdmin/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

namespace {
constexpr int kJacobiMaxSweeps = 100;
constexpr std::size_t kParallelCutoff = 128;
}  // namespace

// ---------------------------------------------------------------------------
// Cholesky

CholeskyFactor::CholeskyFactor(const SymMatrix& a)
    : n_(a.n()), l_(static_cast<std::size_t>(a.n()) * a.n(), 0.0) {
    const int n = n_;
    for (int j = 0; j < n; ++j) {
        double* lj = l_.data() + static_cast<std::size_t>(j) * n;
        double d = a(j, j) - kernels::dot(lj, lj, static_cast<std::size_t>(j));
        if (!(d > 0.0)) {
            throw NotPositiveDefinite("cholesky: non-positive pivot at column " +
                                      std::to_string(j));
        }
        double ljj = std::sqrt(d);
        lj[j] = ljj;
        double inv = 1.0 / ljj;
#pragma omp parallel for schedule(static) if (n - j > static_cast<int>(kParallelCutoff))
        for (int i = j + 1; i < n; ++i) {
            double* li = l_.data() + static_cast<std::size_t>(i) * n;
            li[j] = (a(i, j) - kernels::dot(li, lj, static_cast<std::size_t>(j))) * inv;
        }
    }
}

void CholeskyFactor::solve_in_place(std::vector<double>& b) const {
    const int n = n_;
    // L y = b
    for (int i = 0; i < n; ++i) {
        const double* li = l_.data() + static_cast<std::size_t>(i) * n;
        b[i] = (b[i] - kernels::dot(li, b.data(), static_cast<std::size_t>(i))) / li[i];
    }
    // L' x = y
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= l_[static_cast<std::size_t>(k) * n + i] * b[k];
        b[i] = s / l_[static_cast<std::size_t>(i) * n + i];
    }
}

std::vector<double> CholeskyFactor::solve(const std::vector<double>& b) const {
    std::vector<double> x = b;
    solve_in_place(x);
    return x;
}

void CholeskyFactor::forward_solve_batch(double* rhs, int k) const {
    const int n = n_;
    for (int i = 0; i < n; ++i) {
        const double* li = l_.data() + static_cast<std::size_t>(i) * n;
        double* ri = rhs + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < i; ++j) {
            double lij = li[j];
            if (lij == 0.0) continue;
            const double* rj = rhs + static_cast<std::size_t>(j) * k;
            for (int c = 0; c < k; ++c) ri[c] -= lij * rj[c];
        }
        double inv = 1.0 / li[i];
        for (int c = 0; c < k; ++c) ri[c] *= inv;
    }
}

void CholeskyFactor::rank_one_update(const std::vector<double>& x) {
    const int n = n_;
    std::vector<double> w = x;
    for (int j = 0; j < n; ++j) {
        double* col = l_.data();
        double ljj = l_[static_cast<std::size_t>(j) * n + j];
        double wj = w[j];
        double r = std::hypot(ljj, wj);
        double c = r / ljj;
        double s = wj / ljj;
        l_[static_cast<std::size_t>(j) * n + j] = r;
        for (int i = j + 1; i < n; ++i) {
            double& lij = col[static_cast<std::size_t>(i) * n + j];
            lij = (lij + s * w[i]) / c;
            w[i] = c * w[i] - s * lij;
        }
    }
}

double CholeskyFactor::log_det() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += std::log(l_[static_cast<std::size_t>(j) * n_ + j]);
    return 2.0 * s;
}

// ---------------------------------------------------------------------------
// Solvers

Matrix spd_solve(const SymMatrix& a, const Matrix& b) {
    if (a.n() != b.rows) throw DimensionMismatch("spd_solve: A is " + std::to_string(a.n()) +
                                                 "x" + std::to_string(a.n()) + ", B has " +
                                                 std::to_string(b.rows) + " rows");
    CholeskyFactor chol(a);
    const int n = a.n();
    Matrix x(n, b.cols);
    std::vector<double> col(n);
    for (int j = 0; j < b.cols; ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        chol.solve_in_place(col);
        for (int i = 0; i < n; ++i) x(i, j) = col[i];
    }
    return x;
}

std::vector<double> spd_solve(const SymMatrix& a, const std::vector<double>& b) {
    if (static_cast<std::size_t>(a.n()) != b.size())
        throw DimensionMismatch("spd_solve: dimension mismatch");
    CholeskyFactor chol(a);
    return chol.solve(b);
}

SymMatrix spd_solve_identity(const SymMatrix& a) {
    CholeskyFactor chol(a);
    const int n = a.n();
    SymMatrix x(n);
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        chol.solve_in_place(col);
        for (int i = 0; i < n; ++i) x(i, j) = col[i];
    }
    x.symmetrize();
    return x;
}

// ---------------------------------------------------------------------------
// Jacobi eigendecomposition

void fix_sign(std::vector<double>& v) {
    int arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best) {
            best = m;
            arg = static_cast<int>(i);
        }
    }
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
}

namespace {

inline void rotate(double& g, double& h, double s, double tau) {
    double gg = g;
    double hh = h;
    g = gg - s * (hh + gg * tau);
    h = hh + s * (gg - hh * tau);
}

}  // namespace

EigenDecomp sym_eig(const SymMatrix& input) {
    const int n = input.n();
    SymMatrix a = input;
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);  // eigenvectors, column j
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto at = [&](int i, int j) -> double& { return a(i, j); };

    bool converged = (n <= 1);
    for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += std::abs(at(p, q));
        if (off == 0.0) {
            converged = true;
            break;
        }
        // During early sweeps only rotate pairs that carry real weight.
        double thresh = (sweep < 3) ? 0.2 * off / (static_cast<double>(n) * n) : 0.0;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = at(p, q);
                double g = 100.0 * std::abs(apq);
                // Entry already negligible against the diagonal: zero it out.
                if (sweep > 3 && std::abs(at(p, p)) + g == std::abs(at(p, p)) &&
                    std::abs(at(q, q)) + g == std::abs(at(q, q))) {
                    at(p, q) = 0.0;
                    at(q, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= thresh) continue;

                double h = at(q, q) - at(p, p);
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                double tau = s / (1.0 + c);
                double tapq = t * apq;

                at(p, p) -= tapq;
                at(q, q) += tapq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;

#pragma omp parallel if (n >= static_cast<int>(kParallelCutoff))
                {
#pragma omp for schedule(static) nowait
                    for (int j = 0; j < p; ++j) rotate(at(j, p), at(j, q), s, tau);
#pragma omp for schedule(static) nowait
                    for (int j = p + 1; j < q; ++j) rotate(at(p, j), at(j, q), s, tau);
#pragma omp for schedule(static) nowait
                    for (int j = q + 1; j < n; ++j) rotate(at(p, j), at(q, j), s, tau);
#pragma omp for schedule(static)
                    for (int j = 0; j < n; ++j)
                        rotate(v[static_cast<std::size_t>(j) * n + p],
                               v[static_cast<std::size_t>(j) * n + q], s, tau);
                }
            }
        }
    }
    if (!converged) {
        // Final check: the skip logic can drain the off-diagonal without
        // re-entering the loop head.
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += std::abs(a(p, q));
        double scale = std::max(1.0, input.frob_norm());
        if (off > 1e-12 * scale)
            throw ConvergenceFailure("sym_eig: Jacobi sweeps exhausted, off-diagonal mass " +
                                     std::to_string(off));
    }

    EigenDecomp d;
    d.n = n;
    d.values.resize(n);
    d.vectors.assign(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a(x, x) > a(y, y); });
    for (int j = 0; j < n; ++j) {
        int src = order[j];
        d.values[j] = a(src, src);
        std::vector<double> col(n);
        for (int i = 0; i < n; ++i) col[i] = v[static_cast<std::size_t>(i) * n + src];
        fix_sign(col);
        for (int i = 0; i < n; ++i) d.vectors[static_cast<std::size_t>(i) * n + j] = col[i];
    }
    return d;
}

// ---------------------------------------------------------------------------
// Power iteration

std::pair<double, std::vector<double>> top_eigvec(const SymMatrix& a, double tol, int max_iter) {
    const int n = a.n();
    Rng rng(0x5eedf00dULL);  // fixed internal start for reproducibility
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    double nv = kernels::nrm2(v.data(), v.size());
    for (double& x : v) x /= nv;

    std::vector<double> w(n);
    for (int it = 0; it < max_iter; ++it) {
        kernels::mat_vec(a.data(), n, n, v.data(), w.data());
        double lambda = kernels::dot(v.data(), w.data(), v.size());
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = w[i] - lambda * v[i];
            res += r * r;
        }
        if (std::sqrt(res) <= tol) {
            // Rayleigh quotient and residual are invariant under v -> -v, so
            // the sign convention can be applied after the fact.
            fix_sign(v);
            return {lambda, v};
        }
        double nw = kernels::nrm2(w.data(), w.size());
        for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    throw ConvergenceFailure("top_eigvec: no convergence after " + std::to_string(max_iter) +
                             " iterations");
}

// ---------------------------------------------------------------------------
// Soft thresholding and completion

SymMatrix svd_soft_threshold(const SymMatrix& a, double tau) {
    return svd_soft_threshold_spectrum(a, tau, nullptr);
}

SymMatrix svd_soft_threshold_spectrum(const SymMatrix& a, double tau,
                                      std::vector<double>* spectrum) {
    const int n = a.n();
    EigenDecomp d = sym_eig(a);
    std::vector<int> active;
    std::vector<double> shrunk(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double lam = d.values[j];
        double mag = std::abs(lam) - tau;
        if (mag > 0.0) {
            shrunk[j] = (lam >= 0.0 ? mag : -mag);
            active.push_back(j);
        }
    }
    if (spectrum) *spectrum = shrunk;
    SymMatrix out(n);
#pragma omp parallel for schedule(static) if (n >= static_cast<int>(kParallelCutoff))
    for (int i = 0; i < n; ++i) {
        double* row = out.data() + static_cast<std::size_t>(i) * n;
        for (int r : active) {
            double coeff = shrunk[r] * d.vec(i, r);
            for (int j = 0; j < n; ++j) row[j] += coeff * d.vec(j, r);
        }
    }
    out.symmetrize();
    return out;
}

Matrix orthonormal_completion(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    double norm = kernels::nrm2(v.data(), v.size());
    if (std::abs(norm - 1.0) > 1e-10)
        throw NotUnitVector("orthonormal_completion: |v| = " + std::to_string(norm));

    Matrix q(n, n - 1);
    std::vector<double> u(v);
    u[0] -= 1.0;
    double nu2 = kernels::dot(u.data(), u.data(), u.size());
    if (nu2 < 1e-28) {
        // v is e1 up to rounding; the reflector degenerates to the identity.
        for (int j = 0; j < n - 1; ++j) q(j + 1, j) = 1.0;
        return q;
    }
    double scale = 2.0 / nu2;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j)
            q(i, j - 1) = (i == j ? 1.0 : 0.0) - scale * u[i] * u[j];
    return q;
}

double nuclear_norm(const SymMatrix& a) {
    EigenDecomp d = sym_eig(a);
    double s = 0.0;
    for (double lam : d.values) s += std::abs(lam);
    return s;
}

}  // namespace opdmin
