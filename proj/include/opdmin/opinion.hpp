#pragma once

#include <cstdint>
#include <vector>

#include "opdmin/graph.hpp"
#include "opdmin/sym_matrix.hpp"

namespace opdmin {

using OpinionVector = std::vector<double>;

enum class OpinionMode { Uniform, Polarized };

// One synchronous update z <- (D + I)^{-1} (A z + s).
OpinionVector fj_step(const OpinionVector& z, const WeightedGraph& g, const OpinionVector& s);

// Iterates fj_step from z = s until the sup-norm step change drops below tol.
OpinionVector fj_equilibrium_iterative(const WeightedGraph& g, const OpinionVector& s,
                                       double tol = 1e-10, long max_iter = 1000000);

// Closed form z* = (I + L)^{-1} s via the SPD solver.
OpinionVector fj_equilibrium_closed(const SymMatrix& laplacian, const OpinionVector& s);

// Variance of opinions around their mean, sum_i (z_i - mean)^2.
double polarization(const OpinionVector& z);

// Weighted tension along edges, sum_{(i,j)} w_ij (z_i - z_j)^2 = z' L z.
double disagreement(const OpinionVector& z, const WeightedGraph& g);

// s' (I + L)^{-1} s. Requires mean-centered s.
double objective_f(const OpinionVector& s, const SymMatrix& laplacian);

// Bimodal transform that pushes mass toward the extremes.
double polarize_transform(double x);

// Draws innate opinions: i.i.d. Unif[-1, 1], optionally pushed toward the
// extremes, then mean-centered. If centering leaves entries outside [-1, 1]
// they are clipped and the vector is re-centered once.
OpinionVector sample_opinions(int n, OpinionMode mode, std::uint64_t seed);

double mean(const OpinionVector& v);

}  // namespace opdmin
