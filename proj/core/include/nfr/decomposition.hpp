#pragma once

// Column-generation solver for the long-session LPs.
//
// For every catalog row i the feasible (z_i, f_i.) pairs form the cone
// { t * (1, r) : t >= 0, r in P_i }, where P_i is the set of feasible
// recommendation rows (budget, box, overlap and quality constraints). The
// LP therefore decomposes into a K-row master over conic combinations of
// points of P_i, plus one pricing problem per row. Pricing minimizes a
// linear function over P_i; without the quality row the minimizer is a
// top-N selection (with a sorted slot assignment for position-aware users),
// and the single quality row is handled by a parametric Lagrangian search.
// The result is an exact optimum of build_op_uni / build_op_pref expressed
// in NfrLayout order, without ever materializing the K^2-row tableau.

#include <cstdint>
#include <vector>

#include "nfr/lp_problem.hpp"
#include "nfr/model.hpp"
#include "nfr/simplex.hpp"

namespace nfr {

struct DecompositionOptions {
  double reduced_cost_tol = 1e-10;
  int max_rounds = 20000;
  SimplexOptions master;
};

struct DecompositionStats {
  int rounds = 0;
  int columns = 0;
  std::int64_t master_iterations = 0;
  double min_reduced_cost = 0.0;
};

/// A point of a row polytope: r[n * K + j] is the share of item j in slot n
/// (a single slot for uniform users), and the objective value it attains.
struct RowPoint {
  std::vector<double> r;
  double value = 0.0;
  double quality = 0.0;
};

/// Row pricing problem.
///   uniform:    min sum_j w_j r_j      s.t. sum_j r_j = N, 0 <= r_j <= 1,
///                                           sum_j u_j r_j >= b, r_row = 0
///   positional: min sum_n v_n sum_j w_j r^n_j
///                                      s.t. sum_j r^n_j = 1 for all n,
///                                           sum_n r^n_j <= 1,
///                                           sum_n v_n sum_j u_j r^n_j >= b
/// `clicks` empty selects the uniform variant. Assumes b does not exceed
/// the largest attainable quality (true for b = q * q_max with q <= 1).
RowPoint price_row(int row, const std::vector<double>& w, const std::vector<double>& u, int slots,
                   const Vector& clicks, double b);

/// Exact optimum of build_op_uni (positional = false) or build_op_pref.
LpSolution solve_decomposed(const Scenario& scenario, bool positional,
                            const DecompositionOptions& opts = {},
                            DecompositionStats* stats = nullptr);

}  // namespace nfr
