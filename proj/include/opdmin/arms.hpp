#pragma once

#include <cstdint>
#include <vector>

#include "opdmin/graph.hpp"
#include "opdmin/sym_matrix.hpp"

namespace opdmin {

// One intervention: a graph Laplacian together with its forest matrix
// X = (I + L)^{-1}. The forest matrix is the bandit action.
struct Arm {
    SymMatrix laplacian;
    SymMatrix forest;
    int index = 0;
};

struct ArmSet {
    int n = 0;
    std::vector<Arm> arms;

    int size() const { return static_cast<int>(arms.size()); }
};

enum class ArmRegime { Local, Diverse };
enum class GraphFamily { ErdosRenyi, Sbm };

struct GraphParams {
    GraphFamily family = GraphFamily::ErdosRenyi;
    double er_p = 0.2;
    double sbm_frac1 = 0.75;
    double sbm_p_in = 0.5;
    double sbm_p_out = 0.07;
};

WeightedGraph make_graph(int n, const GraphParams& params, std::uint64_t seed);

// K arms, each the base Laplacian plus `num_edits` random rank-one edge
// edits with weights drawn from [weight_lo, weight_hi]. Edits add weight by
// default, which keeps every Laplacian positive semidefinite without any
// projection. With allow_removal, each edit flips a coin and either adds w or
// subtracts min(w, current weight) on the sampled pair.
ArmSet perturb_local(const WeightedGraph& base, int num_edits, double weight_lo,
                     double weight_hi, int num_arms, std::uint64_t seed,
                     bool allow_removal = false);

// K arms from independently sampled fresh graphs of the given family.
ArmSet generate_diverse(int n, int num_arms, const GraphParams& params, std::uint64_t seed);

// Row-major flattening of the forest matrix; |vec|_2 = |X|_F.
std::vector<double> vectorize(const Arm& arm);

Arm make_arm(SymMatrix laplacian, int index);

}  // namespace opdmin
