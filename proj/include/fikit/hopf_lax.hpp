#pragma once

#include <vector>

#include "fikit/convex.hpp"
#include "fikit/report.hpp"
#include "fikit/space.hpp"

namespace fikit {

/// u = Q_t g together with the per-point minimizer.
struct HopfLaxResult {
    ScalarField u;
    std::vector<int> argmin;
    double t = 0.0;
};

/// Infimum convolution u(x) = min_y [ t·L(d(x,y)/t) + g(y) ], ties broken by
/// lowest y id.  The minimum over a finite set always exists; u ≤ g holds
/// exactly because y = x contributes t·L(0) + g(x) = g(x).
HopfLaxResult hopf_lax(const MetricSpace& space, const ScalarField& g, double t,
                       const ConvexOneDim& L);

/// Max over x of Q_t g(x) − min_y [(t−s)L(d(x,y)/(t−s)) + Q_s g(y)], split
/// into the one-sided defect (positive part; ≤ ~1e-12 on every space) and the
/// two-sided defect (meaningful only on spaces with geodesic witnesses).
struct SemigroupOptions {
    double one_sided_tol = 1e-12;
    // Two-sided equality is asserted only when the space carries geodesic
    // witnesses; pass a tolerance to enable the assertion.
    double two_sided_tol = -1.0;  // < 0: report only
};
CheckReport semigroup_check(const MetricSpace& space, const ScalarField& g, double s,
                            double t, const ConvexOneDim& L,
                            const SemigroupOptions& opts = {});

/// Asserts Q_{t2} g ≤ Q_{t1} g + 1e-12 for consecutive ascending times and
/// Q_t g ≤ g pointwise.
CheckReport monotonicity_check(const MetricSpace& space, const ScalarField& g,
                               const std::vector<double>& times, const ConvexOneDim& L);

/// lip(Q_t g) ≤ lip(g)·(1+1e-9) and sup_x |Q_t g − Q_{t'} g| ≤
/// H(lip g)·|t−t'|·(1+1e-9).
CheckReport lipschitz_bound_check(const MetricSpace& space, const ScalarField& g, double t,
                                  double t_prime, const HamiltonianPair& pair);

/// Forward difference (Q_{t+delta} g − Q_t g)/delta per point.
ScalarField time_derivative(const MetricSpace& space, const ScalarField& g, double t,
                            double delta, const ConvexOneDim& L);

/// Residual r(x) = ∂_t Q_t g(x) + H(|∇⁻ Q_t g|(x)) with forward differences
/// and the edge-mode subgradient.  Residuals shrink under refinement; at
/// fixed resolution only the one-sided bounds are asserted.
struct HjResidualStats {
    CheckReport report;
    ScalarField residual;
    double max_abs_interior = 0.0;
    double min_signed_interior = 0.0;  // mirrors the lower (liminf) bound
    double max_signed_interior = 0.0;  // mirrors the upper (limsup) bound
};
struct HjResidualOptions {
    // Slack for the one-sided bounds; defaults to
    //   lip(g)^2 · (h/delta + delta + 2h)  with h the smallest positive
    // distance, which dominates the O(h/delta) semigroup defect and the
    // O(h) subgradient bias on refining grids.
    double tol = -1.0;  // < 0: use the default formula
};
HjResidualStats hj_residual(const MetricSpace& space, const ScalarField& g, double t,
                            const HamiltonianPair& pair, double delta,
                            const HjResidualOptions& opts = {});

/// Exact rescaling identity Q_t(eps·g) = eps·Q_{eps^{q-1} t} g for the power
/// family; both sides minimize the same objective, so agreement is 1e-10.
CheckReport scaling_check(const MetricSpace& space, const ScalarField& g, double t,
                          double eps, double q);

}  // namespace fikit
