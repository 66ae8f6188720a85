#include "fikit/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fikit {

namespace {

std::string digest_fields(std::initializer_list<const std::vector<double>*> vecs,
                          std::initializer_list<double> params) {
    Digest d;
    for (const auto* v : vecs) d.add(*v);
    for (double p : params) d.add(p);
    return d.hex();
}

double conjugate_of(double e) { return e / (e - 1.0); }

// Subgradient integral ∫ |∇⁻f|^q dμ with the edge-mode stencil.
double subgradient_integral(const MetricSpace& space, const ProbabilityMeasure& mu,
                            const ScalarField& f, double q) {
    auto grad = metric_subgradient(f, space, Neighborhood::edges());
    double acc = 0.0;
    for (int x = 0; x < space.size(); ++x) acc += mu[x] * std::pow(grad[x], q);
    return acc;
}

}  // namespace

double mean(const ProbabilityMeasure& mu, const ScalarField& f) {
    if (f.size() != mu.size()) throw std::invalid_argument("mean: size mismatch");
    double acc = 0.0;
    for (int x = 0; x < mu.size(); ++x) acc += mu[x] * f[x];
    return acc;
}

double log_integral_exp(const ProbabilityMeasure& mu, const ScalarField& z) {
    if (z.size() != mu.size()) throw std::invalid_argument("log_integral_exp: size mismatch");
    double m = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < mu.size(); ++x)
        if (mu[x] > 0.0) m = std::max(m, z[x]);
    double acc = 0.0;
    for (int x = 0; x < mu.size(); ++x)
        if (mu[x] > 0.0) acc += mu[x] * std::exp(z[x] - m);
    return m + std::log(acc);
}

CheckReport lsi_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                      const ScalarField& f, double q, double K) {
    if (!(q > 1.0 && q <= 2.0))
        throw UnsupportedError("the q-log-Sobolev inequality is only available for exponents in "
                               "(1, 2]; it cannot hold for q > 2");
    if (!(K > 0.0)) throw std::invalid_argument("lsi_check needs K > 0");
    ScalarField fq(f.size(), 0.0);
    for (int x = 0; x < f.size(); ++x) fq[x] = std::pow(std::abs(f[x]), q);
    double lhs = entropy(mu, fq);
    double grad_int = subgradient_integral(space, mu, f, q);
    double rhs = (q - 1.0) * std::pow(q / K, q - 1.0) * grad_int;
    CheckReport r;
    r.name = "lsi";
    r.constants = {{"q", q}, {"K", K}, {"entropy", lhs}, {"grad_integral", grad_int}};
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = rhs * 1e-9 + 1e-12;
    r.inputs_digest = digest_fields({&mu.weights, &f.values}, {q, K});
    r.settle();
    return r;
}

double lsi_constant_estimate(const MetricSpace& space, const ProbabilityMeasure& mu,
                             const std::vector<ScalarField>& family, double q) {
    if (!(q > 1.0 && q <= 2.0))
        throw UnsupportedError("the q-log-Sobolev inequality is only available for exponents in "
                               "(1, 2]");
    double k_hat = std::numeric_limits<double>::infinity();
    for (const auto& f : family) {
        ScalarField fq(f.size(), 0.0);
        for (int x = 0; x < f.size(); ++x) fq[x] = std::pow(std::abs(f[x]), q);
        double ent = entropy(mu, fq);
        if (ent < 1e-14) continue;
        double grad_int = subgradient_integral(space, mu, f, q);
        double k_f = q * std::pow((q - 1.0) * grad_int / ent, 1.0 / (q - 1.0));
        k_hat = std::min(k_hat, k_f);
    }
    if (!std::isfinite(k_hat))
        throw NoInformationError("no family member carries entropy; the constant is unbounded");
    return k_hat;
}

CheckReport talagrand_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                            const ProbabilityMeasure& nu, double p, double K) {
    if (!(p >= 2.0))
        throw std::invalid_argument("the p-Talagrand inequality is defined for p >= 2");
    if (!(K > 0.0)) throw std::invalid_argument("talagrand_check needs K > 0");
    double ent = entropy(mu, density_of(nu, mu));
    auto plan = wasserstein_p(nu, mu, space, p);
    CheckReport r;
    r.name = "talagrand";
    r.constants = {{"p", p}, {"K", K}, {"entropy", ent}, {"wp_p", plan.value}};
    r.lhs = plan.value;
    r.rhs = ent / K;
    r.tolerance = 1e-10;
    r.inputs_digest = digest_fields({&mu.weights, &nu.weights}, {p, K});
    r.settle();
    return r;
}

CheckReport talagrand_dual_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                                 const ScalarField& f, double p, double K) {
    if (!(p >= 2.0))
        throw std::invalid_argument("the dual p-Talagrand form is defined for p >= 2");
    if (!(K > 0.0)) throw std::invalid_argument("talagrand_dual_check needs K > 0");
    auto L = ConvexOneDim::power(p);
    auto q1 = hopf_lax(space, f, 1.0, L);
    ScalarField scaled(f.size(), 0.0);
    for (int x = 0; x < f.size(); ++x) scaled[x] = K * q1.u[x];
    double lhs_log = log_integral_exp(mu, scaled);
    double rhs_log = K * mean(mu, f);
    CheckReport r;
    r.name = "dual_talagrand";
    r.constants = {{"p", p}, {"K", K}, {"lhs_log", lhs_log}, {"rhs_log", rhs_log}};
    r.lhs = std::exp(lhs_log);
    r.rhs = std::exp(rhs_log);
    r.tolerance = r.rhs * 1e-9;
    r.inputs_digest = digest_fields({&mu.weights, &f.values}, {p, K});
    if (std::isfinite(r.lhs) && std::isfinite(r.rhs)) {
        r.settle();
    } else {
        r.lhs = lhs_log;
        r.rhs = rhs_log;
        r.tolerance = 1e-9 * std::max(1.0, std::abs(rhs_log));
        r.note = "values in log scale (linear form overflows)";
        r.settle();
    }
    return r;
}

CheckReport hypercontractivity_curve(const MetricSpace& space, const ProbabilityMeasure& mu,
                                     const ScalarField& f, double a, double rho, double q,
                                     const std::vector<double>& ts) {
    if (!(a > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("hypercontractivity needs a > 0 and rho > 0");
    if (ts.empty()) throw std::invalid_argument("empty time grid");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0)) throw std::invalid_argument("times must be positive");
        if (i > 0 && !(ts[i] > ts[i - 1])) throw std::invalid_argument("times must be ascending");
        if (!(a + rho * ts[i] > 0.0)) throw std::invalid_argument("norm exponent must stay positive");
    }
    auto pair = power_pair(q);
    // log F(t) = (1/λ) log ∫ e^{λ Q_t f} dμ, λ = a + ρt; t = 0 gives ‖e^f‖_a
    auto log_norm = [&](const ScalarField& u, double lambda) {
        ScalarField z(u.size(), 0.0);
        for (int x = 0; x < u.size(); ++x) z[x] = lambda * u[x];
        return log_integral_exp(mu, z) / lambda;
    };
    double log_f0 = log_norm(f, a);
    std::vector<double> log_fs, fs;
    log_fs.reserve(ts.size());
    for (double t : ts) {
        auto u = hopf_lax(space, f, t, pair.L);
        log_fs.push_back(log_norm(u.u, a + rho * t));
        fs.push_back(std::exp(log_fs.back()));
    }
    // worst relative increase across consecutive samples, plus the endpoint
    // against the t = 0 norm
    const double slack = std::log1p(1e-6);
    double worst = log_fs.back() - log_f0 - slack;
    for (std::size_t i = 1; i < log_fs.size(); ++i)
        worst = std::max(worst, log_fs[i] - log_fs[i - 1] - slack);
    CheckReport r;
    r.name = "hypercontractivity";
    r.constants = {{"a", a},
                   {"rho", rho},
                   {"q", q},
                   {"F0", std::exp(log_f0)},
                   {"log_F0", log_f0}};
    r.lhs = worst;
    r.rhs = 0.0;
    r.tolerance = 0.0;
    r.samples = {{"t", ts}, {"F", fs}, {"log_F", log_fs}};
    r.inputs_digest = digest_fields({&mu.weights, &f.values}, {a, rho, q});
    r.settle();
    return r;
}

double hc_rho_for_equality(double a, double K, double q) {
    if (!(a > 0.0) || !(K > 0.0)) throw std::invalid_argument("needs a > 0, K > 0");
    if (!(q > 1.0 && q <= 2.0)) throw UnsupportedError("power family needs q in (1, 2]");
    return std::pow(a, 2.0 - q) * std::pow(K, q - 1.0) / (q - 1.0);
}

HcToLsiResult hc_to_lsi(const MetricSpace& space, const ProbabilityMeasure& mu,
                        const ScalarField& f, double a, double rho, double q) {
    if (!(a > 0.0) || !(rho > 0.0)) throw std::invalid_argument("needs a > 0, rho > 0");
    if (!(q > 1.0 && q <= 2.0)) throw UnsupportedError("power family needs q in (1, 2]");
    ScalarField eaf(f.size(), 0.0);
    for (int x = 0; x < f.size(); ++x) eaf[x] = std::exp(a * f[x]);
    double lhs = rho * entropy(mu, eaf);
    auto grad = metric_subgradient(f, space, Neighborhood::edges());
    double rhs = 0.0;
    for (int x = 0; x < f.size(); ++x)
        rhs += mu[x] * eaf[x] * std::pow(grad[x], q) / q;
    rhs *= a * a;
    HcToLsiResult out;
    out.K0 = std::pow((q - 1.0) * rho / std::pow(a, 2.0 - q), 1.0 / (q - 1.0));
    CheckReport r;
    r.name = "hc_differential";
    r.constants = {{"a", a}, {"rho", rho}, {"q", q}, {"K0", out.K0}};
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = rhs * 1e-9 + 1e-12;
    r.inputs_digest = digest_fields({&mu.weights, &f.values}, {a, rho, q});
    r.settle();
    out.differential = r;
    return out;
}

CheckReport hwi_coupling_check(const MetricSpace& space, const ProbabilityMeasure& mu,
                               const ScalarField& f, double p, const HwiOptions& opts) {
    if (!(p >= 2.0)) throw std::invalid_argument("needs p >= 2");
    if (f.size() != mu.size()) throw std::invalid_argument("size mismatch");
    std::vector<double> raw(static_cast<std::size_t>(mu.size()));
    for (int x = 0; x < mu.size(); ++x) {
        if (mu[x] > 0.0 && !(f[x] > 0.0))
            throw std::invalid_argument("density must be positive on the support, fails at point " +
                                        std::to_string(x));
        raw[x] = mu[x] * f[x];
    }
    auto nu = ProbabilityMeasure::normalized(std::move(raw));
    double u_val = entropy(mu, density_of(nu, mu));

    auto plan = wasserstein_p(nu, mu, space, p);  // rows: nu side (x0), cols: mu side (x1)
    auto grad = metric_subgradient(f, space, Neighborhood::edges());
    double coupling_rhs = 0.0;
    for (int x0 = 0; x0 < space.size(); ++x0) {
        if (nu[x0] == 0.0) continue;
        double rate = grad[x0] / f[x0];
        for (int x1 = 0; x1 < space.size(); ++x1) {
            double mass = plan.flow(x0, x1);
            if (mass > 0.0) coupling_rhs += mass * rate * space.dist(x0, x1);
        }
    }
    double q = conjugate_of(p);
    double moment = 0.0;
    for (int x = 0; x < space.size(); ++x)
        if (mu[x] > 0.0) moment += mu[x] * std::pow(grad[x], q) * std::pow(f[x], 1.0 - q);
    double holder_rhs = std::pow(p, 1.0 / p) * plan.wp() * std::pow(moment, 1.0 / q);

    double tol_coupling = opts.rel_tol * coupling_rhs + 1e-10;
    double tol_holder = opts.rel_tol * holder_rhs + 1e-10;
    double excess = std::max(u_val - coupling_rhs - tol_coupling, u_val - holder_rhs - tol_holder);
    CheckReport r;
    r.name = "hwi_coupling";
    r.constants = {{"p", p},
                   {"U", u_val},
                   {"coupling_rhs", coupling_rhs},
                   {"holder_rhs", holder_rhs},
                   {"wp", plan.wp()},
                   {"rel_tol", opts.rel_tol}};
    r.lhs = excess;
    r.rhs = 0.0;
    r.tolerance = 0.0;
    r.inputs_digest = digest_fields({&mu.weights, &f.values}, {p, opts.rel_tol});
    r.settle();
    return r;
}

CheckReport phi_monitor(const MetricSpace& space, const ProbabilityMeasure& mu,
                        const ScalarField& f, double K, double q, const std::vector<double>& ts) {
    if (!(K > 0.0)) throw std::invalid_argument("phi_monitor needs K > 0");
    if (!(q > 1.0 && q <= 2.0)) throw UnsupportedError("power family needs q in (1, 2]");
    if (ts.empty()) throw std::invalid_argument("empty time grid");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0 && ts[i] <= 1.0))
            throw std::invalid_argument("times must lie in (0, 1]");
        if (i > 0 && !(ts[i] > ts[i - 1])) throw std::invalid_argument("times must be ascending");
    }
    auto pair = power_pair(q);
    double n_exp = 1.0 / (q - 1.0);
    std::vector<double> phis;
    phis.reserve(ts.size());
    for (double t : ts) {
        double lambda = K * std::pow(t, n_exp);
        auto u = hopf_lax(space, f, t, pair.L);
        ScalarField z(f.size(), 0.0);
        for (int x = 0; x < f.size(); ++x) z[x] = lambda * u.u[x];
        phis.push_back(log_integral_exp(mu, z) / lambda);
    }
    double f_mean = mean(mu, f);
    double worst = phis.back() - f_mean - 1e-6;
    for (std::size_t i = 1; i < phis.size(); ++i)
        worst = std::max(worst,
                         phis[i] - phis[i - 1] - 1e-6 * std::max(1.0, std::abs(phis[i - 1])));
    CheckReport r;
    r.name = "phi_monitor";
    r.constants = {{"K", K}, {"q", q}, {"n", n_exp}, {"f_mean", f_mean}};
    r.lhs = worst;
    r.rhs = 0.0;
    r.tolerance = 0.0;
    r.samples = {{"t", ts}, {"phi", phis}};
    r.inputs_digest = digest_fields({&mu.weights, &f.values}, {K, q});
    r.settle();
    return r;
}

ScalingSlopes scaling_exponent_probe(const MetricSpace& space, const ProbabilityMeasure& mu,
                                     const ScalarField& g, double p,
                                     const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw std::invalid_argument("empty epsilon list");
    ScalarField centered(g.size(), 0.0);
    double g_mean = mean(mu, g);
    double spread = 0.0;
    for (int x = 0; x < g.size(); ++x) {
        centered[x] = g[x] - g_mean;
        spread = std::max(spread, std::abs(centered[x]));
    }
    if (spread < 1e-14)
        throw std::invalid_argument("perturbation direction is constant on the support");

    ScalingSlopes out;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw std::invalid_argument("epsilons must be positive");
        std::vector<double> raw(static_cast<std::size_t>(mu.size()));
        for (int x = 0; x < mu.size(); ++x) {
            double density = 1.0 + eps * centered[x];
            if (mu[x] > 0.0 && !(density > 0.0))
                throw std::invalid_argument("density 1+eps*g is nonpositive at eps = " +
                                            std::to_string(eps));
            raw[x] = mu[x] * density;
        }
        auto nu = ProbabilityMeasure::normalized(std::move(raw));
        double ent = entropy(mu, density_of(nu, mu));
        double wpp = space.kind == SpaceKind::Grid1d
                         ? wasserstein_1d(nu, mu, space, p)
                         : wasserstein_p(nu, mu, space, p).value;
        out.eps.push_back(eps);
        out.ent.push_back(ent);
        out.wpp.push_back(wpp);
    }
    auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        std::size_t n = xs.size();
        for (std::size_t i = 0; i < n; ++i) {
            double lx = std::log(xs[i]), ly = std::log(ys[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    out.slope_ent = slope(out.eps, out.ent);
    out.slope_wp = slope(out.eps, out.wpp);
    return out;
}

CheckReport lsi_implies_talagrand_suite(const MetricSpace& space, const ProbabilityMeasure& mu,
                                        double q, double K,
                                        const std::vector<ProbabilityMeasure>& nu_samples) {
    if (nu_samples.empty()) throw std::invalid_argument("no measures sampled");
    double p = conjugate_of(q);
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> margins;
    margins.reserve(nu_samples.size());
    for (const auto& nu : nu_samples) {
        auto sub = talagrand_check(space, mu, nu, p, K);
        margins.push_back(sub.margin());
        min_margin = std::min(min_margin, sub.margin());
    }
    CheckReport r;
    r.name = "lsi_implies_talagrand";
    r.constants = {{"q", q},
                   {"p", p},
                   {"K", K},
                   {"samples", static_cast<double>(nu_samples.size())},
                   {"min_margin", min_margin}};
    r.lhs = -min_margin;
    r.rhs = 0.0;
    r.tolerance = 1e-10;
    Digest d;
    d.add(mu.weights).add(q).add(K);
    for (const auto& nu : nu_samples) d.add(nu.weights);
    r.inputs_digest = d.hex();
    r.samples = {{"margin", margins}};
    r.settle();
    return r;
}

CheckReport talagrand_implies_lsi_suite(
    const MetricSpace& space, const ProbabilityMeasure& mu, double p, double K,
    const std::vector<ScalarField>& f_samples,
    const std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>>& endpoint_pairs,
    const TalagrandToLsiOptions& opts) {
    if (!(p >= 2.0)) throw std::invalid_argument("needs p >= 2");
    if (f_samples.empty()) throw std::invalid_argument("no functions sampled");
    double q = conjugate_of(p);
    double k_weak = K * std::pow(p, -p);

    // hypothesis audit: displacement convexity of the entropy along 1D
    // geodesics between the sampled endpoint pairs
    double audit_excess = -std::numeric_limits<double>::infinity();
    bool audited = !endpoint_pairs.empty();
    GeodesicEntropyOptions geo_opts;
    geo_opts.tol = opts.audit_tol;
    for (const auto& [nu0, nu1] : endpoint_pairs) {
        auto audit = entropy_along_geodesic(mu, nu0, nu1, opts.ts, space, p, geo_opts);
        audit_excess = std::max(audit_excess, audit.lhs - audit.rhs);
    }
    if (!audited) audit_excess = 0.0;

    double lsi_excess = -std::numeric_limits<double>::infinity();
    std::vector<double> margins;
    margins.reserve(f_samples.size());
    for (const auto& f : f_samples) {
        auto sub = lsi_check(space, mu, f, q, k_weak);
        margins.push_back(sub.margin());
        lsi_excess = std::max(lsi_excess, sub.lhs - sub.rhs - sub.tolerance);
    }

    CheckReport r;
    r.name = "talagrand_implies_lsi";
    r.constants = {{"p", p},
                   {"q", q},
                   {"K", K},
                   {"K_weak", k_weak},
                   {"audit_excess", audit_excess},
                   {"samples", static_cast<double>(f_samples.size())}};
    r.lhs = std::max(audit_excess, lsi_excess);
    r.rhs = 0.0;
    r.tolerance = 0.0;
    Digest d;
    d.add(mu.weights).add(p).add(K);
    for (const auto& f : f_samples) d.add(f.values);
    r.inputs_digest = d.hex();
    r.samples = {{"lsi_margin", margins}};
    r.settle();
    if (audit_excess > 0.0) {
        // hypothesis not established on this space: the theorem is not
        // falsified, the run is inconclusive
        r.status = CheckStatus::Inconclusive;
        r.note = "hypothesis-unverified: geodesic entropy convexity defect above tolerance";
    }
    return r;
}

}  // namespace fikit
