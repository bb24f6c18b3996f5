#include "opdmin/arms.hpp"

#include <algorithm>
#include <cstdio>

#include "opdmin/errors.hpp"
#include "opdmin/numerics.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

WeightedGraph make_graph(int n, const GraphParams& params, std::uint64_t seed) {
    WeightedGraph g = params.family == GraphFamily::ErdosRenyi
                          ? erdos_renyi(n, params.er_p, seed)
                          : sbm_two_community(n, params.sbm_frac1, params.sbm_p_in,
                                              params.sbm_p_out, seed);
    if (g.connected_components() > 1)
        std::fprintf(stderr, "warning: generated base graph has %d components\n",
                     g.connected_components());
    return g;
}

Arm make_arm(SymMatrix laplacian, int index) {
    Arm a;
    SymMatrix shifted = laplacian;
    for (int i = 0; i < shifted.n(); ++i) shifted(i, i) += 1.0;
    a.forest = spd_solve_identity(shifted);
    a.laplacian = std::move(laplacian);
    a.index = index;
    return a;
}

ArmSet perturb_local(const WeightedGraph& base, int num_edits, double weight_lo,
                     double weight_hi, int num_arms, std::uint64_t seed, bool allow_removal) {
    if (num_edits < 1) throw ConfigError("perturb_local: num_edits must be >= 1");
    if (!(weight_lo > 0.0) || weight_lo > weight_hi)
        throw ConfigError("perturb_local: need 0 < weight_lo <= weight_hi");

    const int n = base.n;
    SymMatrix base_laplacian = laplacian(base);
    ArmSet set;
    set.n = n;
    set.arms.resize(num_arms);

#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < num_arms; ++k) {
        Rng rng(derive_seed(seed, "arm", static_cast<std::uint64_t>(k)));
        SymMatrix l = base_laplacian;
        for (int e = 0; e < num_edits; ++e) {
            int i = rng.uniform_int(0, n - 1);
            int j = rng.uniform_int(0, n - 2);
            if (j >= i) ++j;
            if (i > j) std::swap(i, j);
            double w = rng.uniform(weight_lo, weight_hi);
            if (allow_removal && rng.uniform01() < 0.5) {
                double current = -l(i, j);
                w = -std::min(w, std::max(current, 0.0));
            }
            if (w == 0.0) continue;
            l.add(i, i, w);
            l.add(j, j, w);
            l.add(i, j, -w);
        }
        set.arms[k] = make_arm(std::move(l), k);
    }
    return set;
}

ArmSet generate_diverse(int n, int num_arms, const GraphParams& params, std::uint64_t seed) {
    if (num_arms < 1) throw ConfigError("generate_diverse: need at least one arm");
    ArmSet set;
    set.n = n;
    set.arms.resize(num_arms);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < num_arms; ++k) {
        std::uint64_t s = derive_seed(seed, "diverse-arm", static_cast<std::uint64_t>(k));
        WeightedGraph g = params.family == GraphFamily::ErdosRenyi
                              ? erdos_renyi(n, params.er_p, s)
                              : sbm_two_community(n, params.sbm_frac1, params.sbm_p_in,
                                                  params.sbm_p_out, s);
        set.arms[k] = make_arm(laplacian(g), k);
    }
    return set;
}

std::vector<double> vectorize(const Arm& arm) {
    const double* d = arm.forest.data();
    return std::vector<double>(d, d + static_cast<std::size_t>(arm.forest.n()) * arm.forest.n());
}

}  // namespace opdmin
