#pragma once

#include <vector>

#include "fikit/hopf_lax.hpp"
#include "fikit/report.hpp"
#include "fikit/space.hpp"
#include "fikit/transport.hpp"

namespace fikit {

/// q-log-Sobolev check: Ent_μ(|f|^q) ≤ (q−1)(q/K)^{q−1} ∫ |∇⁻f|^q dμ with
/// the edge-mode subgradient.  Requires 1 < q ≤ 2 (the inequality cannot
/// hold for q > 2) and K > 0.
CheckReport lsi_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                      const ScalarField& f, double q, double K);

/// Largest K for which every family member passes lsi_check with margin ≥ 0:
/// K̂ = min over f of q·((q−1)·∫|∇⁻f|^q dμ / Ent_μ(|f|^q))^{1/(q−1)},
/// skipping members with negligible entropy.  Throws NoInformationError when
/// no member is informative.
double lsi_constant_estimate(const MetricSpace& space, const ProbabilityMeasure& mu,
                             const std::vector<ScalarField>& family, double q);

/// p-Talagrand check: W_p(ν,μ)^p ≤ Ent_μ(dν/dμ)/K for ν ≪ μ, p ≥ 2.
CheckReport talagrand_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                            const ProbabilityMeasure& nu, double p, double K);

/// Dual form ∫ e^{K·Q₁f} dμ ≤ e^{K ∫f dμ} with L(u) = u^p/p; evaluated in
/// log-space.
CheckReport talagrand_dual_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                                 const ScalarField& f, double p, double K);

/// Hypercontractivity curve F(t) = ‖e^{Q_t f}‖_{a+ρt}; pass iff F is
/// non-increasing along ts within 1e-6 relative slack and
/// F(t_max) ≤ ‖e^f‖_a·(1+1e-6).  Samples of F are attached to the report.
CheckReport hypercontractivity_curve(const MetricSpace& space, const ProbabilityMeasure& mu,
                                     const ScalarField& f, double a, double rho, double q,
                                     const std::vector<double>& ts);

/// ρ for which a^{2−q}·K^{q−1} = ρ·(q−1) holds with equality.
double hc_rho_for_equality(double a, double K, double q);

/// t = 0 differential inequality ρ·Ent(e^{af}) ≤ a²∫ e^{af} |∇⁻f|^q/q dμ and
/// the constant K₀ solving a^{2−q} K₀^{q−1} = ρ(q−1).
struct HcToLsiResult {
    double K0 = 0.0;
    CheckReport differential;
};
HcToLsiResult hc_to_lsi(const MetricSpace& space, const ProbabilityMeasure& mu,
                        const ScalarField& f, double a, double rho, double q);

/// Both the coupling bound U_μ(ν) ≤ ∬ (|∇⁻f|/f)(x₀)·d(x₀,x₁) dπ and its
/// Hölder consequence U_μ(ν) ≤ p^{1/p}·W_p(μ,ν)·(∫|∇⁻f|^q f^{1−q} dμ)^{1/q},
/// for ν = f·μ normalized, f > 0 on supp μ.
struct HwiOptions {
    double rel_tol = 0.05;  // discrete-subgradient slack, fraction of rhs
};
CheckReport hwi_coupling_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                               const ScalarField& f, double p, const HwiOptions& opts = {});

/// φ(t) = (1/(K t^n)) log ∫ e^{K t^n Q_t f} dμ with n = 1/(q−1); pass iff
/// non-increasing along ts within 1e-6 relative slack and
/// φ(t_max) ≤ ∫f dμ + 1e-6.  Samples attached.
CheckReport phi_monitor(const MetricSpace& space, const ProbabilityMeasure& mu,
                        const ScalarField& f, double K, double q,
                        const std::vector<double>& ts);

/// Least-squares slopes of log Ent_μ(1+εg̃) and log W_p(ν_ε,μ)^p against
/// log ε, g̃ recentered to mean zero.  On 1D grids W_p^p is evaluated with
/// the quantile coupling (certified equal to the LP elsewhere).
struct ScalingSlopes {
    double slope_ent = 0.0;
    double slope_wp = 0.0;
    std::vector<double> eps;
    std::vector<double> ent;
    std::vector<double> wpp;
};
ScalingSlopes scaling_exponent_probe(const MetricSpace& space, const ProbabilityMeasure& mu,
                                     const ScalarField& g, double p,
                                     const std::vector<double>& eps_list);

/// Runs talagrand_check(μ, ν, p, K) for every sampled ν and aggregates the
/// minimum margin.
CheckReport lsi_implies_talagrand_suite(const MetricSpace& space, const ProbabilityMeasure& mu,
                                        double q, double K,
                                        const std::vector<ProbabilityMeasure>& nu_samples);

/// Hypothesis audit (1D displacement convexity of the entropy) followed by
/// lsi_check(..., q, K·p^{−p}) on every f sample.  Outcome is three-valued:
/// an audit failure yields Inconclusive, never Fail.
struct TalagrandToLsiOptions {
    std::vector<double> ts = {0.0, 0.25, 0.5, 0.75, 1.0};
    double audit_tol = -1.0;  // < 0: entropy_along_geodesic default
};
CheckReport talagrand_implies_lsi_suite(
    const MetricSpace& space, const ProbabilityMeasure& mu, double p, double K,
    const std::vector<ScalarField>& f_samples,
    const std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>>& endpoint_pairs,
    const TalagrandToLsiOptions& opts = {});

/// log Σ μ_i e^{z_i} with a max shift; finite for bounded z.
double log_integral_exp(const ProbabilityMeasure& mu, const ScalarField& z);

/// ∫ f dμ.
double mean(const ProbabilityMeasure& mu, const ScalarField& f);

}  // namespace fikit
