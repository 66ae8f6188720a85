#pragma once

#include <vector>

#include "fikit/report.hpp"
#include "fikit/space.hpp"

namespace fikit {

/// Optimal coupling for the cost d(x,y)^p/p with its dual certificate.
///
/// Conventions: rows are the source (first) measure, columns the target.
/// value = ∬ d^p/p dπ, i.e. W_p^p with the 1/p inside the cost.  The dual
/// potentials are stored so that g(x) ≤ f(y) + d(x,y)^p/p for all points,
/// with f on the source side and g on the target side, and
/// dual_value = Σ g·target − Σ f·source = value at optimality.
struct TransportPlan {
    int n = 0;                  // points in the space
    double p = 2.0;
    std::vector<double> plan;   // n*n row-major, row marginal = source
    double value = 0.0;         // W_p^p
    std::vector<double> pot_f;  // source-side potential
    std::vector<double> pot_g;  // target-side potential

    double wp() const;          // value^{1/p}
    double dual_value(const ProbabilityMeasure& source, const ProbabilityMeasure& target) const;
    double flow(int i, int j) const { return plan[static_cast<std::size_t>(i) * n + j]; }

    struct Certificate {
        double max_row_defect = 0.0;
        double max_col_defect = 0.0;
        double min_entry = 0.0;
        double duality_gap = 0.0;
        double max_dual_violation = 0.0;  // max over pairs of g(x) - f(y) - cost
    };
    Certificate certify(const ProbabilityMeasure& source, const ProbabilityMeasure& target,
                        const MetricSpace& space) const;
};

/// Entropy Ent_mu(h) = ∫ h log h dμ − (∫ h dμ)·log ∫ h dμ with 0·log 0 = 0.
/// Nonnegative by Jensen.  Throws on negative h; throws UndefinedEntropyError
/// when ∫ h dμ = 0.
double entropy(const ProbabilityMeasure& mu, const ScalarField& h);

/// Variational bound ∫ψφ dμ ≤ Ent_μ(φ) for ∫e^ψ dμ ≤ 1; with the maximizer
/// ψ* = log(φ/∫φ dμ) equality holds.  Infeasible ψ yields a failing report,
/// not an exception.
CheckReport entropy_variational_bound(const ProbabilityMeasure& mu, const ScalarField& phi,
                                      const ScalarField& psi);

/// The maximizing ψ* = log(φ/∫φ dμ), capped at −700 where φ vanishes.
ScalarField entropy_variational_maximizer(const ProbabilityMeasure& mu, const ScalarField& phi);

/// Exact optimal transport for the cost d^p/p via primal network simplex on
/// the dense bipartite graph.  Throws CertificationFailureError when the
/// duality gap cannot be closed to 1e-8.
TransportPlan wasserstein_p(const ProbabilityMeasure& source, const ProbabilityMeasure& target,
                            const MetricSpace& space, double p);

/// Quantile-coupling value of ∬ d^p/p dπ on a 1D grid; independent oracle
/// for the LP (monotone transport is optimal for convex costs on the line).
double wasserstein_1d(const ProbabilityMeasure& source, const ProbabilityMeasure& target,
                      const MetricSpace& space, double p);

/// Pushforward of the monotone quantile coupling under (1−t)x + t·T(x),
/// re-binned to the grid by linear mass splitting.  t=0 and t=1 return the
/// endpoints exactly.
ProbabilityMeasure displacement_interpolate_1d(const ProbabilityMeasure& nu0,
                                               const ProbabilityMeasure& nu1,
                                               const MetricSpace& space, double t, double p);

/// Convexity of U_μ along the 1D displacement interpolation: reports the
/// largest positive defect U_μ(ν_t) − t·U_μ(ν_1) − (1−t)·U_μ(ν_0).
struct GeodesicEntropyOptions {
    double tol = -1.0;  // < 0: default 10·h·max(1, |U0|, |U1|)
};
CheckReport entropy_along_geodesic(const ProbabilityMeasure& mu, const ProbabilityMeasure& nu0,
                                   const ProbabilityMeasure& nu1, const std::vector<double>& ts,
                                   const MetricSpace& space, double p,
                                   const GeodesicEntropyOptions& opts = {});

/// Density dν/dμ; throws AbsoluteContinuityError where ν > 0 but μ = 0.
ScalarField density_of(const ProbabilityMeasure& nu, const ProbabilityMeasure& mu);

}  // namespace fikit
