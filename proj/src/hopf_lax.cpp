#include "fikit/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace fikit {

namespace {

int env_thread_count() {
    const char* s = std::getenv("FIKIT_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v > 0 ? v : 1;
}

// Partition [0, n) into contiguous chunks, one worker per chunk.  Each point
// is written by exactly one worker, so the result is bit-identical to the
// sequential loop.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    int workers = std::min(env_thread_count(), n);
    if (workers <= 1 || n < 256) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
        int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string digest_of(const MetricSpace& space, const ScalarField& g,
                      std::initializer_list<double> params) {
    Digest d;
    d.add(space.content_digest()).add(g.values);
    for (double p : params) d.add(p);
    return d.hex();
}

}  // namespace

HopfLaxResult hopf_lax(const MetricSpace& space, const ScalarField& g, double t,
                       const ConvexOneDim& L) {
    int n = space.size();
    if (g.size() != n) throw std::invalid_argument("field size mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("hopf_lax needs t > 0");
    HopfLaxResult res;
    res.t = t;
    res.u = ScalarField(n, 0.0);
    res.argmin.assign(static_cast<std::size_t>(n), 0);
    parallel_for(n, [&](int x) {
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int y = 0; y < n; ++y) {
            double cand = t * L.value(space.dist(x, y) / t) + g[y];
            if (cand < best) {
                best = cand;
                arg = y;
            }
        }
        res.u[x] = best;
        res.argmin[x] = arg;
    });
    return res;
}

CheckReport semigroup_check(const MetricSpace& space, const ScalarField& g, double s, double t,
                            const ConvexOneDim& L, const SemigroupOptions& opts) {
    if (!(0.0 < s && s < t)) throw std::invalid_argument("semigroup_check needs 0 < s < t");
    auto ut = hopf_lax(space, g, t, L);
    auto us = hopf_lax(space, g, s, L);
    auto comp = hopf_lax(space, us.u, t - s, L);
    double one_sided = -std::numeric_limits<double>::infinity();
    double two_sided = 0.0;
    for (int x = 0; x < space.size(); ++x) {
        double defect = ut.u[x] - comp.u[x];
        one_sided = std::max(one_sided, defect);
        two_sided = std::max(two_sided, std::abs(defect));
    }
    CheckReport r;
    r.name = "semigroup";
    r.constants = {{"s", s},
                   {"t", t},
                   {"one_sided_defect", one_sided},
                   {"two_sided_defect", two_sided}};
    r.lhs = one_sided;
    r.rhs = 0.0;
    r.tolerance = opts.one_sided_tol;
    r.inputs_digest = digest_of(space, g, {s, t});
    r.settle();
    bool assert_two_sided = opts.two_sided_tol >= 0.0 && space.has_geodesic_witnesses();
    if (assert_two_sided && two_sided > opts.two_sided_tol) {
        r.pass = false;
        r.status = CheckStatus::Fail;
        r.note = "two-sided defect exceeds tolerance";
    } else if (opts.two_sided_tol >= 0.0 && !space.has_geodesic_witnesses()) {
        r.note = "two-sided equality not asserted: space carries no geodesic witnesses";
    }
    return r;
}

CheckReport monotonicity_check(const MetricSpace& space, const ScalarField& g,
                               const std::vector<double>& times, const ConvexOneDim& L) {
    if (times.empty()) throw std::invalid_argument("monotonicity_check needs at least one time");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0)) throw std::invalid_argument("times must be positive");
        if (k > 0 && !(times[k] > times[k - 1]))
            throw std::invalid_argument("times must be ascending");
    }
    double worst = -std::numeric_limits<double>::infinity();
    ScalarField prev = g;  // Q_0 g = g
    for (double t : times) {
        auto cur = hopf_lax(space, g, t, L);
        for (int x = 0; x < space.size(); ++x)
            worst = std::max(worst, cur.u[x] - prev[x]);
        prev = cur.u;
    }
    CheckReport r;
    r.name = "monotonicity";
    r.constants = {{"t_count", static_cast<double>(times.size())}, {"max_increase", worst}};
    r.lhs = worst;
    r.rhs = 0.0;
    r.tolerance = 1e-12;
    r.inputs_digest = digest_of(space, g, {times.front(), times.back()});
    r.settle();
    return r;
}

CheckReport lipschitz_bound_check(const MetricSpace& space, const ScalarField& g, double t,
                                  double t_prime, const HamiltonianPair& pair) {
    if (!(t > 0.0) || !(t_prime > 0.0))
        throw std::invalid_argument("lipschitz_bound_check needs positive times");
    double lip_g = lipschitz_constant(g, space);
    auto ut = hopf_lax(space, g, t, pair.L);
    auto utp = hopf_lax(space, g, t_prime, pair.L);
    double lip_u = lipschitz_constant(ut.u, space);
    double space_bound = lip_g * (1.0 + 1e-9);
    double time_diff = 0.0;
    for (int x = 0; x < space.size(); ++x)
        time_diff = std::max(time_diff, std::abs(ut.u[x] - utp.u[x]));
    double time_bound = pair.h(lip_g) * std::abs(t - t_prime) * (1.0 + 1e-9);
    CheckReport r;
    r.name = "lipschitz_bound";
    r.constants = {{"t", t},          {"t_prime", t_prime},   {"lip_g", lip_g},
                   {"lip_u", lip_u},  {"time_diff", time_diff}, {"H_lip_g", pair.h(lip_g)}};
    // fold both bounds into one margin: worst normalized excess
    double excess_space = lip_u - space_bound;
    double excess_time = time_diff - time_bound;
    r.lhs = std::max(excess_space, excess_time);
    r.rhs = 0.0;
    r.tolerance = 1e-15 * std::max(1.0, lip_g + pair.h(lip_g));
    r.inputs_digest = digest_of(space, g, {t, t_prime});
    r.settle();
    return r;
}

ScalarField time_derivative(const MetricSpace& space, const ScalarField& g, double t,
                            double delta, const ConvexOneDim& L) {
    if (!(t > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("time_derivative needs t > 0, delta > 0");
    auto u0 = hopf_lax(space, g, t, L);
    auto u1 = hopf_lax(space, g, t + delta, L);
    ScalarField out(space.size(), 0.0);
    for (int x = 0; x < space.size(); ++x) out[x] = (u1.u[x] - u0.u[x]) / delta;
    return out;
}

HjResidualStats hj_residual(const MetricSpace& space, const ScalarField& g, double t,
                            const HamiltonianPair& pair, double delta,
                            const HjResidualOptions& opts) {
    if (!(t > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("hj_residual needs t > 0, delta > 0");
    int n = space.size();
    auto ut = hopf_lax(space, g, t, pair.L);
    auto fd = time_derivative(space, g, t, delta, pair.L);
    auto grad_edge = metric_subgradient(ut.u, space, Neighborhood::edges());
    auto grad_glob = metric_subgradient(ut.u, space, Neighborhood::global());

    double lip_g = lipschitz_constant(g, space);
    double h = space.min_positive_dist();
    double tol = opts.tol;
    if (tol < 0.0)
        tol = (lip_g + lip_g * lip_g) * (h / delta + delta + 2.0 * h) + 1e-12;

    auto is_interior = [&](int x) {
        if (space.kind == SpaceKind::Grid1d) return x > 0 && x + 1 < n;
        if (space.kind == SpaceKind::Grid2d) return space.neighbors(x).size() == 4;
        return true;
    };

    HjResidualStats stats;
    stats.residual = ScalarField(n, 0.0);
    double min_signed = std::numeric_limits<double>::infinity();
    double max_signed = -std::numeric_limits<double>::infinity();
    double certified_floor = std::numeric_limits<double>::infinity();
    bool any_interior = false;
    for (int x = 0; x < n; ++x) {
        stats.residual[x] = fd[x] + pair.h(grad_edge[x]);
        // one-sided defect with the global subgradient; tighter than edge mode,
        // still O(h) below zero because the discrete subgradient underestimates
        // the gradient by up to half a grid step
        certified_floor = std::min(certified_floor, fd[x] + pair.h(grad_glob[x]));
        if (!is_interior(x)) continue;
        any_interior = true;
        min_signed = std::min(min_signed, stats.residual[x]);
        max_signed = std::max(max_signed, stats.residual[x]);
    }
    if (!any_interior) {
        min_signed = 0.0;
        max_signed = 0.0;
    }
    stats.min_signed_interior = min_signed;
    stats.max_signed_interior = max_signed;
    stats.max_abs_interior = std::max(std::abs(min_signed), std::abs(max_signed));

    CheckReport r;
    r.name = "hj_residual";
    r.constants = {{"t", t},
                   {"delta", delta},
                   {"tol", tol},
                   {"lip_g", lip_g},
                   {"min_signed_interior", min_signed},
                   {"max_signed_interior", max_signed},
                   {"max_abs_interior", stats.max_abs_interior},
                   {"floor_global", certified_floor}};
    // lower bound (holds on every space); upper bound only with witnesses
    double violation = std::max(0.0, -min_signed - tol);
    if (space.has_geodesic_witnesses())
        violation = std::max(violation, max_signed - tol);
    else
        r.note = "upper residual bound not asserted: space carries no geodesic witnesses";
    r.lhs = violation;
    r.rhs = 0.0;
    r.tolerance = 0.0;
    r.inputs_digest = digest_of(space, g, {t, delta});
    r.settle();
    stats.report = r;
    return stats;
}

CheckReport scaling_check(const MetricSpace& space, const ScalarField& g, double t, double eps,
                          double q) {
    if (!(eps > 0.0)) throw std::invalid_argument("scaling_check needs eps > 0");
    if (!(t > 0.0)) throw std::invalid_argument("scaling_check needs t > 0");
    auto pair = power_pair(q);  // throws UnsupportedError outside (1, 2]
    ScalarField scaled(space.size(), 0.0);
    for (int x = 0; x < space.size(); ++x) scaled[x] = eps * g[x];
    auto lhs_res = hopf_lax(space, scaled, t, pair.L);
    auto rhs_res = hopf_lax(space, g, std::pow(eps, q - 1.0) * t, pair.L);
    double worst = 0.0;
    for (int x = 0; x < space.size(); ++x)
        worst = std::max(worst, std::abs(lhs_res.u[x] - eps * rhs_res.u[x]));
    CheckReport r;
    r.name = "scaling";
    r.constants = {{"t", t}, {"eps", eps}, {"q", q}, {"max_diff", worst}};
    r.lhs = worst;
    r.rhs = 0.0;
    r.tolerance = 1e-10;
    r.inputs_digest = digest_of(space, g, {t, eps, q});
    r.settle();
    return r;
}

}  // namespace fikit
