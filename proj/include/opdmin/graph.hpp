#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opdmin/sym_matrix.hpp"

namespace opdmin {

// Undirected weighted edge in canonical form: u < v, weight > 0.
struct Edge {
    int u;
    int v;
    double w;
};

struct WeightedGraph {
    int n = 0;
    std::vector<Edge> edges;

    double total_weight() const;
    std::vector<double> weighted_degrees() const;
    int connected_components() const;  // union-find
};

// G(n, p) with unit weights; every unordered pair is wired independently.
WeightedGraph erdos_renyi(int n, double p, std::uint64_t seed);

// Two-community stochastic block model; community 1 holds round(frac1 * n)
// nodes, intra pairs wired with p_in, inter pairs with p_out, unit weights.
WeightedGraph sbm_two_community(int n, double frac1, double p_in, double p_out,
                                std::uint64_t seed);

SymMatrix laplacian(const WeightedGraph& g);
SymMatrix adjacency(const WeightedGraph& g);

// Reads a whitespace-separated edge list: `src dst [weight]`, one edge per
// line, `#` comments. Node ids may be arbitrary strings; they are reindexed
// densely in first-appearance order. Self-loops are skipped and duplicate
// undirected edges keep the first weight, both with a warning on stderr.
WeightedGraph load_edge_list(const std::string& path);

}  // namespace opdmin
