#pragma once

#include <vector>

namespace fikit::detail {

/// Exact solution of the dense transportation problem
///   min Σ cost[i*k+j]·x[i][j]  s.t.  Σ_j x = supply_i, Σ_i x = demand_j, x ≥ 0
/// by primal network simplex on the bipartite graph (northwest-corner start,
/// block pricing).  Duals satisfy u_i + v_j ≤ cost within FP rounding.
struct SimplexSolution {
    std::vector<double> flow;  // m*k row-major
    std::vector<double> u;     // source duals
    std::vector<double> v;     // target duals
    double primal = 0.0;
    double dual = 0.0;
    long pivots = 0;
};

/// Throws CertificationFailureError when the pivot cap is exhausted before
/// the pricing pass finds no improving arc.
SimplexSolution solve_transportation(const std::vector<double>& supply,
                                     const std::vector<double>& demand,
                                     const std::vector<double>& cost);

}  // namespace fikit::detail
