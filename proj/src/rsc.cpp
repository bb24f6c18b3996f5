#include "opdmin/rsc.hpp"

#include <algorithm>
#include <cmath>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/opinion.hpp"
#include "opdmin/rng.hpp"
#include "opdmin/stage1.hpp"

namespace opdmin {

double kappa_min(const ArmSet& arms) {
    const int n = arms.n;
    const long k = arms.size();
    const long d = static_cast<long>(n) * n;
    if (k < d) return 0.0;  // rank deficiency, smallest eigenvalue is exactly zero
    if (d > 1024)
        throw ConfigError("kappa_min: exact computation limited to n <= 32 with K >= n^2");

    SymMatrix m(static_cast<int>(d));
    double inv = 1.0 / static_cast<double>(k);
    for (const Arm& arm : arms.arms) {
        const double* x = arm.forest.data();
        for (long i = 0; i < d; ++i) {
            double* row = m.data() + i * d;
            double xi = inv * x[i];
            if (xi == 0.0) continue;
            for (long j = 0; j < d; ++j) row[j] += xi * x[j];
        }
    }
    m.symmetrize();
    EigenDecomp dec = sym_eig(m);
    double lam = dec.values.back();
    if (lam < 0.0 && lam > -1e-10) lam = 0.0;
    return std::max(lam, 0.0);
}

// ---------------------------------------------------------------------------
// Cone machinery

namespace {

// Aligned component of Delta for projector P = u u':
//   aligned = c u u' + u r' + r u'  with  w = Delta u, c = u' w, r = w - c u.
// Its nonzero spectrum lives on span{u, r}, so the nuclear norm has the
// closed form sqrt(c^2 + 4 |r|^2).
struct AlignedPart {
    std::vector<double> u;
    std::vector<double> r;
    double c = 0.0;
    double nuc = 0.0;
};

AlignedPart aligned_part(const SymMatrix& delta, const std::vector<double>& u) {
    const int n = delta.n();
    AlignedPart p;
    p.u = u;
    std::vector<double> w(n);
    kernels::mat_vec(delta.data(), n, n, u.data(), w.data());
    p.c = kernels::dot(u.data(), w.data(), n);
    p.r = w;
    kernels::axpy(-p.c, u.data(), p.r.data(), n);
    double rn = kernels::nrm2(p.r.data(), n);
    p.nuc = std::sqrt(p.c * p.c + 4.0 * rn * rn);
    return p;
}

SymMatrix aligned_matrix(const AlignedPart& p) {
    const int n = static_cast<int>(p.u.size());
    SymMatrix a(n);
    for (int i = 0; i < n; ++i) {
        double* row = a.data() + static_cast<std::size_t>(i) * n;
        double ui = p.u[i];
        double ri = p.r[i];
        for (int j = 0; j < n; ++j)
            row[j] = p.c * ui * p.u[j] + ui * p.r[j] + ri * p.u[j];
    }
    return a;
}

}  // namespace

bool cone_contains(const SymMatrix& delta, const ConeSpec& cone, double slack) {
    AlignedPart p = aligned_part(delta, cone.s_direction);
    SymMatrix remainder = delta - aligned_matrix(p);
    return nuclear_norm(remainder) <= cone.cone_factor * p.nuc + slack;
}

SymMatrix cone_project(const SymMatrix& delta, const ConeSpec& cone) {
    AlignedPart p = aligned_part(delta, cone.s_direction);
    SymMatrix aligned = aligned_matrix(p);
    SymMatrix remainder = delta - aligned;
    double rem_nuc = nuclear_norm(remainder);
    if (rem_nuc <= cone.cone_factor * p.nuc + 1e-9) return delta;
    double alpha = rem_nuc > 0.0 ? cone.cone_factor * p.nuc / rem_nuc : 0.0;
    remainder *= alpha;
    return aligned + remainder;
}

// ---------------------------------------------------------------------------
// PGD heuristic

namespace {

// Power iteration with deflation and a warm start. Converges to the
// largest-magnitude remaining eigenpair; a capped iteration count is fine
// here because the surrounding loop is itself a heuristic.
struct Deflation {
    const double* v;
    double lambda;
};

std::pair<double, std::vector<double>> power_pair(const SymMatrix& m,
                                                  std::vector<double> start,
                                                  const std::vector<Deflation>& deflate,
                                                  int max_iter) {
    const int n = m.n();
    auto project_out = [&](std::vector<double>& x) {
        for (const Deflation& d : deflate) {
            double ip = kernels::dot(d.v, x.data(), n);
            kernels::axpy(-ip, d.v, x.data(), n);
        }
    };
    project_out(start);
    double norm = kernels::nrm2(start.data(), n);
    if (norm < 1e-300) {
        // Deterministic fallback direction.
        std::fill(start.begin(), start.end(), 0.0);
        start[deflate.size() % n] = 1.0;
        project_out(start);
        norm = kernels::nrm2(start.data(), n);
        if (norm < 1e-300) return {0.0, start};
    }
    for (double& x : start) x /= norm;

    std::vector<double> w(n);
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        kernels::mat_vec(m.data(), n, n, start.data(), w.data());
        for (const Deflation& d : deflate) {
            double ip = kernels::dot(d.v, start.data(), n);
            kernels::axpy(-d.lambda * ip, d.v, w.data(), n);
        }
        lambda = kernels::dot(start.data(), w.data(), n);
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            double e = w[i] - lambda * start[i];
            res += e * e;
        }
        double wn = kernels::nrm2(w.data(), n);
        if (wn < 1e-300) return {0.0, start};
        if (std::sqrt(res) <= 1e-11 * std::max(1.0, std::abs(lambda))) break;
        for (int i = 0; i < n; ++i) start[i] = w[i] / wn;
        project_out(start);
        double sn = kernels::nrm2(start.data(), n);
        if (sn < 1e-300) return {0.0, start};
        for (double& x : start) x /= sn;
    }
    return {lambda, start};
}

struct Rank2 {
    double l1 = 0.0, l2 = 0.0;
    std::vector<double> v1, v2;
};

void build_rank2(const Rank2& r, SymMatrix& out) {
    const int n = static_cast<int>(r.v1.size());
    double* o = out.data();
    for (int i = 0; i < n; ++i) {
        double a = r.l1 * r.v1[i];
        double b = r.l2 * r.v2[i];
        double* row = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) row[j] = a * r.v1[j] + b * r.v2[j];
    }
}

// Cone projection specialized to a rank-2 iterate with known eigenpairs.
// The remainder (I-P) Delta (I-P) then has rank at most two and both nuclear
// norms come from closed 2x2 forms; the rescaled result is assembled in
// O(n^2). Cross-checked against cone_project in the test suite.
void cone_project_rank2(SymMatrix& delta, const Rank2& pairs, const ConeSpec& cone) {
    const int n = delta.n();
    const std::vector<double>& u = cone.s_direction;
    AlignedPart p = aligned_part(delta, u);

    double rem_nuc = 0.0;
    {
        std::vector<double> g1 = pairs.v1;
        double ip1 = kernels::dot(u.data(), g1.data(), n);
        kernels::axpy(-ip1, u.data(), g1.data(), n);
        std::vector<double> g2 = pairs.v2;
        double ip2 = kernels::dot(u.data(), g2.data(), n);
        kernels::axpy(-ip2, u.data(), g2.data(), n);

        // Orthonormal basis {q1, q2} of span{g1, g2}.
        double n1 = kernels::nrm2(g1.data(), n);
        std::vector<double> q1, q2;
        if (n1 > 1e-14) {
            q1 = g1;
            for (double& x : q1) x /= n1;
        }
        std::vector<double> t = g2;
        if (!q1.empty()) {
            double ip = kernels::dot(q1.data(), t.data(), n);
            kernels::axpy(-ip, q1.data(), t.data(), n);
        }
        double n2 = kernels::nrm2(t.data(), n);
        if (n2 > 1e-14) {
            q2 = t;
            for (double& x : q2) x /= n2;
        }
        if (q1.empty()) std::swap(q1, q2);

        if (!q1.empty()) {
            auto proj = [&](const std::vector<double>& q, const std::vector<double>& g) {
                return kernels::dot(q.data(), g.data(), n);
            };
            double a11 = pairs.l1 * proj(q1, g1) * proj(q1, g1) +
                         pairs.l2 * proj(q1, g2) * proj(q1, g2);
            if (q2.empty()) {
                rem_nuc = std::abs(a11);
            } else {
                double a12 = pairs.l1 * proj(q1, g1) * proj(q2, g1) +
                             pairs.l2 * proj(q1, g2) * proj(q2, g2);
                double a22 = pairs.l1 * proj(q2, g1) * proj(q2, g1) +
                             pairs.l2 * proj(q2, g2) * proj(q2, g2);
                double tr = a11 + a22;
                double det = a11 * a22 - a12 * a12;
                double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
                rem_nuc = std::abs(0.5 * (tr + disc)) + std::abs(0.5 * (tr - disc));
            }
        }
    }

    if (rem_nuc <= cone.cone_factor * p.nuc + 1e-9) return;  // already feasible
    double alpha = rem_nuc > 0.0 ? cone.cone_factor * p.nuc / rem_nuc : 0.0;
    // delta = aligned + remainder, so the rescale is a blend with the aligned part.
    SymMatrix aligned = aligned_matrix(p);
    delta *= alpha;
    aligned *= 1.0 - alpha;
    delta += aligned;
}

}  // namespace

CurvatureReport kappa_hat_pgd(const ArmSet& arms, const std::vector<int>& sample_indices,
                              const ConeSpec& cone, const PgdOptions& opts) {
    if (opts.restarts < 1) throw ConfigError("kappa_hat_pgd: need at least one restart");
    const int n = arms.n;

    std::vector<double> weights(arms.size(), 0.0);
    if (sample_indices.empty()) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(arms.size()));
    } else {
        double inv = 1.0 / static_cast<double>(sample_indices.size());
        for (int idx : sample_indices) weights[idx] += inv;
    }
    DesignOperator design(arms, std::move(weights));

    double lam_max = design.top_eigenvalue();
    double eta = lam_max > 0.0 ? opts.step / (2.0 * lam_max) : opts.step;

    std::vector<double> best_per_restart(opts.restarts);
    std::vector<long> iters_per_restart(opts.restarts, 0);
    std::vector<char> converged_per_restart(opts.restarts, 0);
    std::vector<SymMatrix> delta_per_restart(opts.restarts);

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < opts.restarts; ++r) {
        Rng rng(derive_seed(opts.seed, "pgd-restart", static_cast<std::uint64_t>(r)));
        SymMatrix delta(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) delta.set(i, j, rng.normal());

        Rank2 pairs;
        pairs.v1.resize(n);
        pairs.v2.resize(n);
        for (double& x : pairs.v1) x = rng.normal();
        for (double& x : pairs.v2) x = rng.normal();

        auto project_cycle = [&](SymMatrix& d) {
            auto [l1, v1] = power_pair(d, pairs.v1, {}, 60);
            std::vector<Deflation> defl{{v1.data(), l1}};
            auto [l2, v2] = power_pair(d, pairs.v2, defl, 60);
            pairs = Rank2{l1, l2, std::move(v1), std::move(v2)};
            build_rank2(pairs, d);
            cone_project_rank2(d, pairs, cone);
            double norm = d.frob_norm();
            if (norm < 1e-300) {
                // Cone projection collapsed the iterate; fall back to the
                // fully aligned direction u u', which is always feasible.
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        d(i, j) = cone.s_direction[i] * cone.s_direction[j];
                norm = d.frob_norm();
            }
            d *= 1.0 / norm;
        };

        project_cycle(delta);
        double best = design.quadratic(delta);
        SymMatrix best_delta = delta;

        SymMatrix grad(n), prev(n);
        bool converged = false;
        int it = 0;
        for (; it < opts.iterations; ++it) {
            prev = delta;
            design.apply(delta, grad);
            kernels::axpy(-2.0 * eta, grad.data(), delta.data(),
                          static_cast<std::size_t>(n) * n);
            project_cycle(delta);
            double obj = design.quadratic(delta);
            if (obj < best) {
                best = obj;
                best_delta = delta;
            }
            prev -= delta;
            double change = prev.frob_norm();
            if (change < 1e-10) {
                converged = true;
                ++it;
                break;
            }
        }
        best_per_restart[r] = best;
        delta_per_restart[r] = std::move(best_delta);
        iters_per_restart[r] = it;
        converged_per_restart[r] = converged ? 1 : 0;
    }

    CurvatureReport report;
    report.kappa_min = kappa_min(arms);
    report.restarts = opts.restarts;
    int best_r = 0;
    for (int r = 0; r < opts.restarts; ++r) {
        report.pgd_iterations += iters_per_restart[r];
        if (best_per_restart[r] < best_per_restart[best_r]) best_r = r;
    }
    report.kappa_hat = std::max(best_per_restart[best_r], 0.0);
    report.converged = converged_per_restart[best_r] != 0;
    report.best_delta = std::move(delta_per_restart[best_r]);
    return report;
}

RscSummary rsc_trials(const RscTrialConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError("rsc: trials must be >= 1");
    std::vector<double> hats(cfg.trials), mins(cfg.trials);

#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < cfg.trials; ++t) {
        std::uint64_t graph_seed = derive_seed(cfg.seed, "rsc-graph", t);
        std::uint64_t arm_seed = derive_seed(cfg.seed, "rsc-arms", t);
        ArmSet arms;
        if (cfg.regime == ArmRegime::Local) {
            WeightedGraph base = cfg.graph.family == GraphFamily::ErdosRenyi
                                     ? erdos_renyi(cfg.n, cfg.graph.er_p, graph_seed)
                                     : sbm_two_community(cfg.n, cfg.graph.sbm_frac1,
                                                         cfg.graph.sbm_p_in,
                                                         cfg.graph.sbm_p_out, graph_seed);
            int edits = cfg.num_edits > 0 ? cfg.num_edits : 2 * cfg.n;
            arms = perturb_local(base, edits, cfg.weight_lo, cfg.weight_hi, cfg.num_arms,
                                 arm_seed);
        } else {
            arms = generate_diverse(cfg.n, cfg.num_arms, cfg.graph, arm_seed);
        }

        OpinionVector s =
            sample_opinions(cfg.n, OpinionMode::Uniform, derive_seed(cfg.seed, "rsc-s", t));
        double norm = kernels::nrm2(s.data(), s.size());
        ConeSpec cone;
        cone.s_direction = s;
        for (double& x : cone.s_direction) x /= norm;

        PgdOptions pgd = cfg.pgd;
        pgd.seed = derive_seed(cfg.seed, "rsc-pgd", t);
        CurvatureReport rep = kappa_hat_pgd(arms, {}, cone, pgd);
        hats[t] = rep.kappa_hat;
        mins[t] = rep.kappa_min;
    }

    RscSummary out;
    out.trials = cfg.trials;
    double hm = 0.0, mm = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        hm += hats[t];
        mm += mins[t];
    }
    out.kappa_hat_mean = hm / cfg.trials;
    out.kappa_min_mean = mm / cfg.trials;
    if (cfg.trials > 1) {
        double v = 0.0;
        for (double h : hats) v += (h - out.kappa_hat_mean) * (h - out.kappa_hat_mean);
        out.kappa_hat_std = std::sqrt(v / (cfg.trials - 1));
    }
    return out;
}

}  // namespace opdmin
