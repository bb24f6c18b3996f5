#include "opdmin/opinion.hpp"

#include <algorithm>
#include <cmath>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

double mean(const OpinionVector& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

OpinionVector fj_step(const OpinionVector& z, const WeightedGraph& g, const OpinionVector& s) {
    if (static_cast<int>(z.size()) != g.n || z.size() != s.size())
        throw DimensionMismatch("fj_step: opinion/graph dimensions differ");
    OpinionVector out = s;  // A z + s, accumulated edge by edge
    for (const Edge& e : g.edges) {
        out[e.u] += e.w * z[e.v];
        out[e.v] += e.w * z[e.u];
    }
    std::vector<double> deg = g.weighted_degrees();
    for (int i = 0; i < g.n; ++i) out[i] /= deg[i] + 1.0;
    return out;
}

OpinionVector fj_equilibrium_iterative(const WeightedGraph& g, const OpinionVector& s,
                                       double tol, long max_iter) {
    if (!(tol > 0.0)) throw ConfigError("fj_equilibrium_iterative: tol must be positive");
    OpinionVector z = s;
    for (long it = 0; it < max_iter; ++it) {
        OpinionVector next = fj_step(z, g, s);
        double delta = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            delta = std::max(delta, std::abs(next[i] - z[i]));
        z = std::move(next);
        if (delta <= tol) return z;
    }
    throw ConvergenceFailure("fj_equilibrium_iterative: no convergence within " +
                             std::to_string(max_iter) + " iterations");
}

OpinionVector fj_equilibrium_closed(const SymMatrix& laplacian, const OpinionVector& s) {
    SymMatrix a = laplacian;
    for (int i = 0; i < a.n(); ++i) a(i, i) += 1.0;
    return spd_solve(a, s);
}

double polarization(const OpinionVector& z) {
    double mu = mean(z);
    double s = 0.0;
    for (double x : z) s += (x - mu) * (x - mu);
    return s;
}

double disagreement(const OpinionVector& z, const WeightedGraph& g) {
    if (static_cast<int>(z.size()) != g.n)
        throw DimensionMismatch("disagreement: opinion/graph dimensions differ");
    double s = 0.0;
    for (const Edge& e : g.edges) {
        double d = z[e.u] - z[e.v];
        s += e.w * d * d;
    }
    return s;
}

double objective_f(const OpinionVector& s, const SymMatrix& laplacian) {
    if (std::abs(mean(s)) > 1e-9)
        throw MeanNotCentered("objective_f: innate opinions must be mean-centered, |mean| = " +
                              std::to_string(std::abs(mean(s))));
    OpinionVector z = fj_equilibrium_closed(laplacian, s);
    return kernels::dot(s.data(), z.data(), s.size());
}

double polarize_transform(double x) { return std::copysign(std::cbrt(std::abs(x)), x); }

OpinionVector sample_opinions(int n, OpinionMode mode, std::uint64_t seed) {
    if (n < 2) throw ConfigError("sample_opinions: need at least 2 nodes");
    Rng rng(seed);
    OpinionVector s(n);
    for (double& x : s) x = rng.uniform(-1.0, 1.0);
    if (mode == OpinionMode::Polarized)
        for (double& x : s) x = polarize_transform(x);

    double mu = mean(s);
    for (double& x : s) x -= mu;

    bool out_of_range = false;
    for (double x : s)
        if (x < -1.0 || x > 1.0) out_of_range = true;
    if (out_of_range) {
        for (double& x : s) x = std::clamp(x, -1.0, 1.0);
        mu = mean(s);
        for (double& x : s) x -= mu;
    }
    return s;
}

}  // namespace opdmin
