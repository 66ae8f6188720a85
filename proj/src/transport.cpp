#include "fikit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "network_simplex.hpp"

namespace fikit {

namespace {

double kahan_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0, c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double term = a[i] * b[i] - c;
        double s = sum + term;
        c = (s - sum) - term;
        sum = s;
    }
    return sum;
}

double cost_of(const MetricSpace& space, int i, int j, double p) {
    return std::pow(space.dist(i, j), p) / p;
}

std::string digest_of(const ProbabilityMeasure& a, const ProbabilityMeasure& b,
                      std::initializer_list<double> params) {
    Digest d;
    d.add(a.weights).add(b.weights);
    for (double v : params) d.add(v);
    return d.hex();
}

}  // namespace

double TransportPlan::wp() const { return std::pow(value, 1.0 / p); }

double TransportPlan::dual_value(const ProbabilityMeasure& source,
                                 const ProbabilityMeasure& target) const {
    return kahan_dot(pot_g, target.weights) - kahan_dot(pot_f, source.weights);
}

TransportPlan::Certificate TransportPlan::certify(const ProbabilityMeasure& source,
                                                  const ProbabilityMeasure& target,
                                                  const MetricSpace& space) const {
    Certificate c;
    c.min_entry = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            double x = flow(i, j);
            c.min_entry = std::min(c.min_entry, x);
            row += x;
        }
        c.max_row_defect = std::max(c.max_row_defect, std::abs(row - source[i]));
    }
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i) col += flow(i, j);
        c.max_col_defect = std::max(c.max_col_defect, std::abs(col - target[j]));
    }
    c.duality_gap = std::abs(value - dual_value(source, target));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            c.max_dual_violation =
                std::max(c.max_dual_violation, pot_g[x] - pot_f[y] - cost_of(space, y, x, p));
    return c;
}

double entropy(const ProbabilityMeasure& mu, const ScalarField& h) {
    if (h.size() != mu.size()) throw std::invalid_argument("entropy: size mismatch");
    double i1 = 0.0, i0 = 0.0;
    for (int x = 0; x < mu.size(); ++x) {
        if (h[x] < 0.0)
            throw std::invalid_argument("entropy: negative density at point " + std::to_string(x));
        i0 += mu[x] * h[x];
        if (h[x] > 0.0) i1 += mu[x] * h[x] * std::log(h[x]);
    }
    if (!(i0 > 0.0)) throw UndefinedEntropyError("entropy: density integrates to zero");
    return i1 - i0 * std::log(i0);
}

ScalarField entropy_variational_maximizer(const ProbabilityMeasure& mu, const ScalarField& phi) {
    double i0 = 0.0;
    for (int x = 0; x < mu.size(); ++x) {
        if (phi[x] < 0.0) throw std::invalid_argument("negative density");
        i0 += mu[x] * phi[x];
    }
    if (!(i0 > 0.0)) throw UndefinedEntropyError("density integrates to zero");
    ScalarField psi(phi.size(), 0.0);
    for (int x = 0; x < phi.size(); ++x)
        psi[x] = phi[x] > 0.0 ? std::log(phi[x] / i0) : -700.0;
    return psi;
}

CheckReport entropy_variational_bound(const ProbabilityMeasure& mu, const ScalarField& phi,
                                      const ScalarField& psi) {
    if (phi.size() != mu.size() || psi.size() != mu.size())
        throw std::invalid_argument("size mismatch");
    double ent = entropy(mu, phi);
    double pairing = 0.0;
    double exp_mass = 0.0;
    for (int x = 0; x < mu.size(); ++x) {
        pairing += mu[x] * psi[x] * phi[x];
        exp_mass += mu[x] * std::exp(psi[x]);
    }
    CheckReport r;
    r.name = "entropy_variational";
    r.constants = {{"entropy", ent}, {"pairing", pairing}, {"exp_mass", exp_mass}};
    r.lhs = pairing;
    r.rhs = ent;
    r.tolerance = 1e-10;
    r.inputs_digest = Digest().add(mu.weights).add(phi.values).add(psi.values).hex();
    if (exp_mass > 1.0 + 1e-12) {
        r.pass = false;
        r.status = CheckStatus::Fail;
        r.note = "constraint violated: integral of e^psi exceeds 1";
    } else {
        r.settle();
    }
    return r;
}

TransportPlan wasserstein_p(const ProbabilityMeasure& source, const ProbabilityMeasure& target,
                            const MetricSpace& space, double p) {
    int n = space.size();
    if (source.size() != n || target.size() != n)
        throw std::invalid_argument("wasserstein_p: measure does not match the space");
    if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_p needs p >= 1");
    source.validate();
    target.validate();

    std::vector<int> src_ids, tgt_ids;
    for (int i = 0; i < n; ++i)
        if (source[i] > 0.0) src_ids.push_back(i);
    for (int j = 0; j < n; ++j)
        if (target[j] > 0.0) tgt_ids.push_back(j);
    int m = static_cast<int>(src_ids.size());
    int k = static_cast<int>(tgt_ids.size());

    std::vector<double> supply(static_cast<std::size_t>(m)), demand(static_cast<std::size_t>(k));
    for (int i = 0; i < m; ++i) supply[i] = source[src_ids[i]];
    for (int j = 0; j < k; ++j) demand[j] = target[tgt_ids[j]];
    std::vector<double> cost(static_cast<std::size_t>(m) * k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j)
            cost[static_cast<std::size_t>(i) * k + j] = cost_of(space, src_ids[i], tgt_ids[j], p);

    auto sol = detail::solve_transportation(supply, demand, cost);

    double gap = std::abs(sol.primal - sol.dual);
    double gap_tol = 1e-8 * std::max(1.0, std::abs(sol.primal));
    if (gap > gap_tol) {
        std::ostringstream msg;
        msg << "transportation duality gap " << gap << " exceeds " << gap_tol;
        throw CertificationFailureError(msg.str());
    }

    TransportPlan plan;
    plan.n = n;
    plan.p = p;
    plan.value = sol.primal;
    plan.plan.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) {
            double x = sol.flow[static_cast<std::size_t>(i) * k + j];
            if (x > 0.0) plan.plan[static_cast<std::size_t>(src_ids[i]) * n + tgt_ids[j]] = x;
        }

    // potentials: f = -u on sources, g = v on targets, normalized so the
    // first active target sits at zero; then extended to inactive points so
    // g(x) - f(y) <= cost(y, x) holds for the full point set
    double shift = sol.v[0];
    const double neg_inf = -std::numeric_limits<double>::infinity();
    plan.pot_f.assign(static_cast<std::size_t>(n), neg_inf);
    plan.pot_g.assign(static_cast<std::size_t>(n), neg_inf);
    for (int i = 0; i < m; ++i) plan.pot_f[src_ids[i]] = -(sol.u[i] + shift);
    for (int j = 0; j < k; ++j) plan.pot_g[tgt_ids[j]] = sol.v[j] - shift;
    for (int x = 0; x < n; ++x) {
        if (plan.pot_g[x] != neg_inf) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
            best = std::min(best, plan.pot_f[src_ids[i]] + cost_of(space, src_ids[i], x, p));
        plan.pot_g[x] = best;
    }
    for (int y = 0; y < n; ++y) {
        if (plan.pot_f[y] != neg_inf) continue;
        double best = neg_inf;
        for (int x = 0; x < n; ++x) best = std::max(best, plan.pot_g[x] - cost_of(space, y, x, p));
        plan.pot_f[y] = best;
    }
    return plan;
}

double wasserstein_1d(const ProbabilityMeasure& source, const ProbabilityMeasure& target,
                      const MetricSpace& space, double p) {
    if (space.kind != SpaceKind::Grid1d)
        throw UnsupportedError("the quantile coupling needs a 1D grid");
    int n = space.size();
    if (source.size() != n || target.size() != n)
        throw std::invalid_argument("measure does not match the space");
    if (!(p >= 1.0)) throw std::invalid_argument("needs p >= 1");
    // grid ids ascend with the coordinate, so id order is quantile order
    double value = 0.0, comp = 0.0;
    int i = 0, j = 0;
    double ra = source[0], rb = target[0];
    while (i < n && j < n) {
        if (ra == 0.0) {
            if (++i == n) break;
            ra = source[i];
            continue;
        }
        if (rb == 0.0) {
            if (++j == n) break;
            rb = target[j];
            continue;
        }
        double mass = std::min(ra, rb);
        double term = mass * cost_of(space, i, j, p) - comp;
        double s = value + term;
        comp = (s - value) - term;
        value = s;
        ra -= mass;
        rb -= mass;
    }
    return value;
}

ProbabilityMeasure displacement_interpolate_1d(const ProbabilityMeasure& nu0,
                                               const ProbabilityMeasure& nu1,
                                               const MetricSpace& space, double t, double p) {
    if (space.kind != SpaceKind::Grid1d)
        throw UnsupportedError("displacement interpolation needs a 1D grid");
    if (!(p >= 2.0)) throw std::invalid_argument("needs p >= 2");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("needs t in [0, 1]");
    int n = space.size();
    if (nu0.size() != n || nu1.size() != n)
        throw std::invalid_argument("measure does not match the space");
    if (t == 0.0) return nu0;
    if (t == 1.0) return nu1;

    double a = space.coord(0);
    double h = space.grid_step();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    auto deposit = [&](double pos, double mass) {
        double rel = (pos - a) / h;
        int cell = static_cast<int>(std::floor(rel));
        cell = std::clamp(cell, 0, n - 2);
        double frac = std::clamp(rel - cell, 0.0, 1.0);
        out[cell] += mass * (1.0 - frac);
        out[cell + 1] += mass * frac;
    };
    int i = 0, j = 0;
    double ra = nu0[0], rb = nu1[0];
    while (i < n && j < n) {
        if (ra == 0.0) {
            if (++i == n) break;
            ra = nu0[i];
            continue;
        }
        if (rb == 0.0) {
            if (++j == n) break;
            rb = nu1[j];
            continue;
        }
        double mass = std::min(ra, rb);
        deposit((1.0 - t) * space.coord(i) + t * space.coord(j), mass);
        ra -= mass;
        rb -= mass;
    }
    ProbabilityMeasure nu{std::move(out)};
    nu.validate();
    return nu;
}

ScalarField density_of(const ProbabilityMeasure& nu, const ProbabilityMeasure& mu) {
    if (nu.size() != mu.size()) throw std::invalid_argument("size mismatch");
    ScalarField rho(mu.size(), 0.0);
    for (int x = 0; x < mu.size(); ++x) {
        if (mu[x] > 0.0) {
            rho[x] = nu[x] / mu[x];
        } else if (nu[x] > 0.0) {
            throw AbsoluteContinuityError("measure puts mass " + std::to_string(nu[x]) +
                                          " at point " + std::to_string(x) +
                                          " outside the support of the reference");
        }
    }
    return rho;
}

CheckReport entropy_along_geodesic(const ProbabilityMeasure& mu, const ProbabilityMeasure& nu0,
                                   const ProbabilityMeasure& nu1, const std::vector<double>& ts,
                                   const MetricSpace& space, double p,
                                   const GeodesicEntropyOptions& opts) {
    double u0 = entropy(mu, density_of(nu0, mu));
    double u1 = entropy(mu, density_of(nu1, mu));
    double defect = 0.0;
    std::vector<double> us;
    us.reserve(ts.size());
    for (double t : ts) {
        auto nut = displacement_interpolate_1d(nu0, nu1, space, t, p);
        double ut = entropy(mu, density_of(nut, mu));
        us.push_back(ut);
        defect = std::max(defect, ut - t * u1 - (1.0 - t) * u0);
    }
    double h = space.grid_step();
    double tol = opts.tol >= 0.0
                     ? opts.tol
                     : 10.0 * h * std::max({1.0, std::abs(u0), std::abs(u1)});
    CheckReport r;
    r.name = "geodesic_entropy";
    r.constants = {{"p", p}, {"U0", u0}, {"U1", u1}, {"max_defect", defect}, {"tol", tol}};
    r.lhs = defect;
    r.rhs = tol;
    r.tolerance = 0.0;
    r.samples = {{"t", ts}, {"U", us}};
    r.inputs_digest = digest_of(nu0, nu1, {p});
    r.settle();
    return r;
}

}  // namespace fikit
