// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Tolerances are pinned here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fikit/convex.hpp"
#include "fikit/families.hpp"
#include "fikit/hopf_lax.hpp"
#include "fikit/inequalities.hpp"
#include "fikit/space.hpp"
#include "fikit/transport.hpp"

using namespace fikit;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

ScalarField abs_coordinate(const MetricSpace& s) {
    ScalarField g(s.size(), 0.0);
    for (int i = 0; i < s.size(); ++i) g[i] = std::abs(s.coord(i));
    return g;
}

ProbabilityMeasure random_measure(int n, std::mt19937_64& rng) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (auto& v : w) v = 0.05 + static_cast<double>(rng() % 1000) / 1000.0;
    return ProbabilityMeasure::normalized(std::move(w));
}

// single-mode field with slope exactly lip at the crest; keeps the discrete
// flow active from t = 0.1 on (multi-mode draws can cancel to sub-grid slopes,
// freezing the flow and telling us nothing)
ScalarField active_field(const MetricSpace& s, double lip, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unif = [&] { return (rng() >> 11) * 0x1.0p-53; };
    double omega = 1.0 + 0.6 * unif();
    double phase = 2.0 * M_PI * unif();
    return trig_field(s, lip / omega, omega, phase);
}

long vm_hwm_kb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream ss(line.substr(6));
            long kb = 0;
            ss >> kb;
            return kb;
        }
    }
    return -1;
}

// --- criteria -------------------------------------------------------------

bool c01_huber(std::string& detail) {
    auto s = build_grid_1d(-2.0, 2.0, 401);
    auto g = abs_coordinate(s);
    auto t0 = clock_type::now();
    auto res = hopf_lax(s, g, 1.0, ConvexOneDim::power(2.0));
    double elapsed = seconds_since(t0);
    double worst = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        double x = s.coord(i);
        double oracle = std::abs(x) <= 1.0 ? x * x / 2 : std::abs(x) - 0.5;
        worst = std::max(worst, std::abs(res.u[i] - oracle));
    }
    std::ostringstream ss;
    ss << "sup error " << worst << " (limit 0.02), " << elapsed << " s";
    detail = ss.str();
    return worst <= 0.02 && elapsed < 1.0;
}

bool c02_semigroup(std::string& detail) {
    auto L = ConvexOneDim::power(2.0);
    // one-sided bound on every space kind
    std::vector<MetricSpace> spaces;
    spaces.push_back(build_grid_1d(-2.0, 2.0, 161));
    spaces.push_back(build_grid_2d(0.0, 1.0, 9, 0.0, 1.0, 9));
    std::vector<GraphEdge> edges;
    std::mt19937_64 rng(2026);
    for (int i = 0; i < 40; ++i) edges.push_back({i, (i + 1) % 40, 0.3 + (rng() % 70) / 100.0});
    for (int k = 0; k < 15; ++k) {
        int u = static_cast<int>(rng() % 40), v = static_cast<int>(rng() % 40);
        if (u != v) edges.push_back({u, v, 0.5 + (rng() % 100) / 100.0});
    }
    spaces.push_back(build_graph(40, edges));
    spaces.push_back(build_heisenberg_grid(3, 0.5));
    double worst_one_sided = -1e300;
    for (const auto& sp : spaces) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            auto g = random_lipschitz_field(sp, 1.0, seed);
            auto r = semigroup_check(sp, g, 0.4, 1.0, L);
            worst_one_sided = std::max(worst_one_sided, r.lhs);
            if (!r.pass || r.lhs > 1e-12) {
                detail = "one-sided defect " + std::to_string(r.lhs) + " on " +
                         to_string(sp.kind);
                return false;
            }
        }
    }
    // two-sided defect on the witnessed grid, halving under refinement
    auto coarse = build_grid_1d(-2.0, 2.0, 401);
    SemigroupOptions opts;
    opts.two_sided_tol = 5.0 * coarse.grid_step();
    auto rc = semigroup_check(coarse, abs_coordinate(coarse), 0.5, 1.0, L, opts);
    double dc = rc.constants.at("two_sided_defect");
    auto fine = build_grid_1d(-2.0, 2.0, 801);
    auto rf = semigroup_check(fine, abs_coordinate(fine), 0.5, 1.0, L);
    double df = rf.constants.at("two_sided_defect");
    double factor = dc / df;
    std::ostringstream ss;
    ss << "one-sided max " << worst_one_sided << ", two-sided " << dc << " (limit "
       << 5.0 * coarse.grid_step() << "), refinement factor " << factor;
    detail = ss.str();
    return rc.pass && dc <= 5.0 * coarse.grid_step() && factor >= 1.8;
}

bool c03_monotonicity(std::string& detail) {
    auto s = build_grid_1d(-2.0, 2.0, 401);
    auto L = ConvexOneDim::power(2.0);
    double worst = -1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = random_lipschitz_field(s, 1.0, seed);
        auto r = monotonicity_check(s, g, {0.25, 0.5, 1.0, 2.0}, L);
        worst = std::max(worst, r.lhs);
        if (!r.pass || r.lhs > 1e-12) {
            detail = "increase " + std::to_string(r.lhs) + " at seed " + std::to_string(seed);
            return false;
        }
    }
    detail = "max increase " + std::to_string(worst) + " over 20 seeds (limit 1e-12)";
    return true;
}

bool c04_scaling(std::string& detail) {
    auto s = build_grid_1d(-1.0, 1.0, 201);
    double worst = 0.0;
    for (double q : {1.5, 2.0})
        for (double eps : {0.5, 2.0})
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                auto g = random_lipschitz_field(s, 1.0, seed);
                auto r = scaling_check(s, g, 0.8, eps, q);
                worst = std::max(worst, r.lhs);
                if (!r.pass || r.lhs > 1e-10) {
                    detail = "deviation " + std::to_string(r.lhs);
                    return false;
                }
            }
    detail = "max deviation " + std::to_string(worst) + " (limit 1e-10)";
    return true;
}

bool c05_lipschitz(std::string& detail) {
    auto s = build_grid_1d(-2.0, 2.0, 401);
    auto pair = power_pair(2.0);
    double worst_space = 0.0, worst_time = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = random_lipschitz_field(s, 1.0, seed);
        auto r = lipschitz_bound_check(s, g, 1.0, 0.5, pair);
        double lip_g = r.constants.at("lip_g");
        worst_space = std::max(worst_space, r.constants.at("lip_u") / lip_g);
        worst_time =
            std::max(worst_time, r.constants.at("time_diff") / (pair.h(lip_g) * 0.5));
        if (!r.pass) {
            detail = "bound violated at seed " + std::to_string(seed);
            return false;
        }
    }
    std::ostringstream ss;
    ss << "lip ratio " << worst_space << ", time ratio " << worst_time
       << " (limits 1+1e-9)";
    detail = ss.str();
    return true;
}

bool c06_residual(std::string& detail) {
    auto pair = power_pair(2.0);
    auto coarse = build_grid_1d(-2.0, 2.0, 201);  // h = 0.02
    auto fine = build_grid_1d(-2.0, 2.0, 401);    // h = 0.01
    auto rc = hj_residual(coarse, abs_coordinate(coarse), 1.0, pair, 0.02);
    auto rf = hj_residual(fine, abs_coordinate(fine), 1.0, pair, 0.01);
    double factor = rc.max_abs_interior / rf.max_abs_interior;
    std::ostringstream ss;
    ss << "max residual " << rc.max_abs_interior << " -> " << rf.max_abs_interior
       << ", factor " << factor << " (needs >= 1.5), one-sided bounds "
       << (rc.report.pass && rf.report.pass ? "hold" : "VIOLATED");
    detail = ss.str();
    return rc.report.pass && rf.report.pass && factor >= 1.5;
}

bool c07_transport(std::string& detail) {
    std::mt19937_64 rng(10007);
    double worst_gap = 0.0;
    auto s50 = build_grid_1d(-2.0, 2.0, 50);
    for (int inst = 0; inst < 50; ++inst) {
        auto a = random_measure(50, rng);
        auto b = random_measure(50, rng);
        double p = inst % 2 == 0 ? 2.0 : 3.0;
        auto plan = wasserstein_p(a, b, s50, p);
        auto cert = plan.certify(a, b, s50);
        worst_gap = std::max(worst_gap, std::abs(cert.duality_gap));
        if (std::abs(cert.duality_gap) > 1e-8) {
            detail = "duality gap " + std::to_string(cert.duality_gap);
            return false;
        }
    }
    double worst_lp_vs_quantile = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        int n = 20 + static_cast<int>(rng() % 41);
        auto s = build_grid_1d(-1.0, 1.0, n);
        auto a = random_measure(n, rng);
        auto b = random_measure(n, rng);
        double p = inst % 2 == 0 ? 2.0 : 3.0;
        double lp = wasserstein_p(a, b, s, p).value;
        double oracle = wasserstein_1d(a, b, s, p);
        worst_lp_vs_quantile = std::max(worst_lp_vs_quantile, std::abs(lp - oracle));
        if (std::abs(lp - oracle) > 1e-8) {
            detail = "LP vs quantile " + std::to_string(lp - oracle);
            return false;
        }
    }
    double worst_sym = 0.0, worst_tri = 0.0;
    for (int inst = 0; inst < 8; ++inst) {
        auto a = random_measure(50, rng);
        auto b = random_measure(50, rng);
        auto c = random_measure(50, rng);
        double p = inst % 2 == 0 ? 2.0 : 3.0;
        double ab = wasserstein_p(a, b, s50, p).wp();
        double ba = wasserstein_p(b, a, s50, p).wp();
        double bc = wasserstein_p(b, c, s50, p).wp();
        double ac = wasserstein_p(a, c, s50, p).wp();
        worst_sym = std::max(worst_sym, std::abs(ab - ba));
        worst_tri = std::max(worst_tri, ac - ab - bc);
    }
    std::ostringstream ss;
    ss << "gap " << worst_gap << ", LP-quantile " << worst_lp_vs_quantile << ", symmetry "
       << worst_sym << ", triangle excess " << worst_tri << " (limits 1e-8)";
    detail = ss.str();
    return worst_sym <= 1e-8 && worst_tri <= 1e-8;
}

bool c08_entropy(std::string& detail) {
    std::mt19937_64 rng(20011);
    double min_ent = 1e300;
    for (int k = 0; k < 200; ++k) {
        int n = 5 + static_cast<int>(rng() % 60);
        auto mu = random_measure(n, rng);
        ScalarField h(n, 0.0);
        for (int i = 0; i < n; ++i) h[i] = static_cast<double>(rng() % 1000) / 250.0;
        double e = entropy(mu, h);
        min_ent = std::min(min_ent, e);
        if (e < -1e-12) {
            detail = "negative entropy " + std::to_string(e);
            return false;
        }
    }
    double worst_eq = 0.0;
    for (int k = 0; k < 100; ++k) {
        int n = 10 + static_cast<int>(rng() % 30);
        auto mu = random_measure(n, rng);
        ScalarField phi(n, 0.0);
        for (int i = 0; i < n; ++i) phi[i] = 0.1 + static_cast<double>(rng() % 1000) / 500.0;
        auto psi = entropy_variational_maximizer(mu, phi);
        auto r = entropy_variational_bound(mu, phi, psi);
        worst_eq = std::max(worst_eq, std::abs(r.lhs - r.rhs));
        if (!r.pass || std::abs(r.lhs - r.rhs) > 1e-10) {
            detail = "variational equality gap " + std::to_string(r.lhs - r.rhs);
            return false;
        }
    }
    ProbabilityMeasure two{{0.5, 0.5}};
    ScalarField ind(std::vector<double>{2.0, 0.0});
    double log2_err = std::abs(entropy(two, ind) - std::log(2.0));
    std::ostringstream ss;
    ss << "min entropy " << min_ent << ", equality gap " << worst_eq << ", log2 error "
       << log2_err;
    detail = ss.str();
    return log2_err <= 1e-12;
}

bool c09_gaussian_saturation(std::string& detail) {
    double target = std::exp(0.5) / 2.0;
    auto ratio_err_at = [&](int n, double& lhs_err, double& rhs_err) {
        auto s = build_grid_1d(-6.0, 6.0, n);
        auto mu = gaussian_measure(s, 1.0, {0.0});
        ScalarField f(s.size(), 0.0);
        for (int i = 0; i < s.size(); ++i) f[i] = std::exp(s.coord(i) / 2.0);
        auto r = lsi_check(s, mu, f, 2.0, 1.0);
        lhs_err = std::abs(r.lhs - target) / target;
        rhs_err = std::abs(r.rhs - target) / target;
        return std::abs(r.lhs / r.rhs - 1.0);
    };
    double lhs601, rhs601, lhs1201, rhs1201;
    double ratio601 = ratio_err_at(601, lhs601, rhs601);
    double ratio1201 = ratio_err_at(1201, lhs1201, rhs1201);
    std::ostringstream ss;
    ss << "lhs off by " << lhs601 << ", rhs off by " << rhs601 << ", ratio off by " << ratio601
       << " at n=601 (limits 2%); n=1201 ratio " << ratio1201;
    detail = ss.str();
    return lhs601 <= 0.02 && rhs601 <= 0.02 && ratio601 <= 0.02 && ratio1201 < ratio601;
}

bool c10_lsi_to_talagrand(std::string& detail) {
    auto t0 = clock_type::now();
    auto s = build_grid_1d(-6.0, 6.0, 601);
    auto mu = gaussian_measure(s, 1.0, {0.0});
    auto family = exponential_family(s, {0.2, 0.4, 0.6, 0.8, 1.0});
    std::ostringstream ss;
    for (double q : {2.0, 1.5}) {
        double K = lsi_constant_estimate(s, mu, family, q);
        if (q == 2.0 && std::abs(K - 1.0) > 0.02) {
            detail = "estimated constant " + std::to_string(K) + " not close to 1";
            return false;
        }
        auto nus = random_perturbed_family(s, mu, 0.5, 100, 90210 + static_cast<int>(10 * q));
        auto r = lsi_implies_talagrand_suite(s, mu, q, K, nus);
        ss << "q=" << q << ": K " << K << ", min margin " << r.constants.at("min_margin")
           << "; ";
        if (!r.pass) {
            detail = ss.str() + "suite failed";
            return false;
        }
    }
    double elapsed = seconds_since(t0);
    ss << elapsed << " s (limit 120)";
    detail = ss.str();
    return elapsed < 120.0;
}

bool c11_hypercontractivity(std::string& detail) {
    auto s = build_grid_1d(-6.0, 6.0, 601);
    auto mu = gaussian_measure(s, 1.0, {0.0});
    auto family = exponential_family(s, {0.2, 0.4, 0.6, 0.8, 1.0});
    std::vector<double> ts;
    for (int k = 1; k <= 10; ++k) ts.push_back(0.1 * k);
    double worst = -1e300;
    for (double q : {1.5, 2.0}) {
        double K = lsi_constant_estimate(s, mu, family, q);
        double rho = hc_rho_for_equality(1.0, K, q);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto f = active_field(s, 0.25, seed);
            auto r = hypercontractivity_curve(s, mu, f, 1.0, rho, q, ts);
            worst = std::max(worst, r.lhs);
            if (!r.pass) {
                detail = "norm increase at q=" + std::to_string(q) + " seed " +
                         std::to_string(seed);
                return false;
            }
        }
    }
    std::ostringstream ss;
    ss << "worst log-norm increase " << worst << " (slack 1e-6), 20 seeds x q in {1.5, 2}";
    detail = ss.str();
    return true;
}

bool c12_phi_monitor(std::string& detail) {
    auto s = build_grid_1d(-6.0, 6.0, 601);
    auto mu = gaussian_measure(s, 1.0, {0.0});
    double K = lsi_constant_estimate(s, mu, exponential_family(s, {0.2, 0.4, 0.6, 0.8, 1.0}),
                                     2.0);
    std::vector<double> ts;
    for (int k = 1; k <= 10; ++k) ts.push_back(0.1 * k);
    double worst_gap = 0.0, worst_inc = -1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto f = active_field(s, 0.25, seed);
        auto r = phi_monitor(s, mu, f, K, 2.0, ts);
        worst_inc = std::max(worst_inc, r.lhs);
        double gap = std::abs(r.samples[1].second.front() - r.constants.at("f_mean"));
        worst_gap = std::max(worst_gap, gap);
        if (!r.pass || gap > 1e-3) {
            detail = "seed " + std::to_string(seed) + ": endpoint gap " + std::to_string(gap)
                     + (r.pass ? "" : " and monotonicity violated");
            return false;
        }
    }
    std::ostringstream ss;
    ss << "worst increase " << worst_inc << ", worst endpoint gap " << worst_gap
       << " (limit 1e-3)";
    detail = ss.str();
    return true;
}

bool c13_order_probe(std::string& detail) {
    auto s = build_grid_1d(-6.0, 6.0, 601);
    auto mu = gaussian_measure(s, 1.0, {0.0});
    auto g = trig_field(s, 2.0, 0.7, 0.3);
    std::vector<double> eps;
    for (int k = 0; k < 8; ++k) eps.push_back(0.02 * std::pow(10.0, k / 7.0));
    std::ostringstream ss;
    bool ok = true;
    for (double p : {2.0, 3.0}) {
        auto slopes = scaling_exponent_probe(s, mu, g, p, eps);
        ss << "p=" << p << ": ent slope " << slopes.slope_ent << ", transport slope "
           << slopes.slope_wp << "; ";
        ok = ok && std::abs(slopes.slope_ent - 2.0) <= 0.1 &&
             std::abs(slopes.slope_wp - p) <= 0.15;
    }
    ss << "(limits 2 +- 0.1 and p +- 0.15)";
    detail = ss.str();
    return ok;
}

bool c14_talagrand_to_lsi(std::string& detail) {
    auto s = build_grid_1d(-6.0, 6.0, 601);
    auto mu = gaussian_measure(s, 1.0, {0.0});
    auto family = exponential_family(s, {0.2, 0.4, 0.6, 0.8, 1.0});
    double K = lsi_constant_estimate(s, mu, family, 2.0);
    std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> pairs;
    auto ends = random_perturbed_family(s, mu, 0.5, 20, 31415);
    for (int k = 0; k < 10; ++k) pairs.emplace_back(ends[2 * k], ends[2 * k + 1]);
    auto r = talagrand_implies_lsi_suite(s, mu, 2.0, K, family, pairs);
    std::ostringstream ss;
    ss << "audit excess " << r.constants.at("audit_excess") << ", weak constant "
       << r.constants.at("K_weak") << ", status " << to_string(r.status)
       << " (must be pass)";
    detail = ss.str();
    return r.status == CheckStatus::Pass;
}

bool c15_heisenberg(std::string& detail) {
    auto s = build_heisenberg_grid(6, 0.5);
    // beta = 1/2 keeps several lattice shells in the bulk; tighter measures
    // leave too few occupied steps for the transport side of the transfer
    auto mu = gibbs_measure(s, 0, 0.5, 2.0);
    auto family = exponential_family(s, {0.2, 0.4, 0.6, 0.8, 1.0});
    double K = lsi_constant_estimate(s, mu, family, 2.0);
    if (!(std::isfinite(K) && K > 0.0)) {
        detail = "estimated constant " + std::to_string(K);
        return false;
    }
    // nu samples: empirical one-point measures drawn from mu; smooth tilts
    // have entropy quadratic in the tilt but transport cost bounded below by
    // the lattice step, so they cannot probe the constant on a coarse ball
    std::mt19937_64 rng(27182);
    auto unif = [&] { return (rng() >> 11) * 0x1.0p-53; };
    std::vector<ProbabilityMeasure> nus;
    for (int k = 0; k < 20; ++k) {
        double u = unif(), acc = 0.0;
        int pick = s.size() - 1;
        for (int i = 0; i < s.size(); ++i) {
            acc += mu[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        std::vector<double> w(static_cast<std::size_t>(s.size()), 0.0);
        w[static_cast<std::size_t>(pick)] = 1.0;
        nus.push_back(ProbabilityMeasure{std::move(w)});
    }
    auto r = lsi_implies_talagrand_suite(s, mu, 2.0, K, nus);
    std::ostringstream ss;
    ss << s.size() << " points, K " << K << ", min margin " << r.constants.at("min_margin");
    detail = ss.str();
    return r.pass;
}

}  // namespace

int main() {
    auto start = clock_type::now();
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    std::vector<Criterion> criteria = {
        {"hopf-lax flow matches the closed-form envelope of |x|", c01_huber},
        {"semigroup law: one-sided exact, two-sided vanishing with the grid", c02_semigroup},
        {"flow is monotone in time and dominated by the initial data", c03_monotonicity},
        {"rescaling identity holds to rounding", c04_scaling},
        {"space and time Lipschitz bounds", c05_lipschitz},
        {"hamilton-jacobi residual refines and respects the one-sided bound", c06_residual},
        {"optimal transport is certified: gap, quantile oracle, metric axioms", c07_transport},
        {"entropy identities: positivity, variational equality, two-point value", c08_entropy},
        {"gaussian saturates the 2-log-sobolev inequality at constant 1", c09_gaussian_saturation},
        {"estimated log-sobolev constant transfers to talagrand", c10_lsi_to_talagrand},
        {"hypercontractivity at the balanced rate", c11_hypercontractivity},
        {"normalized log-integral monitor decreases to the mean", c12_phi_monitor},
        {"perturbation orders: entropy quadratic, transport p-th order", c13_order_probe},
        {"convexity audit plus weak-constant converse is conclusive", c14_talagrand_to_lsi},
        {"heisenberg pipeline: finite constant, talagrand suite", c15_heisenberg},
    };

    int failures = 0;
    int id = 0;
    for (auto& c : criteria) {
        ++id;
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %2d. %s — %s\n", ok ? "PASS" : "FAIL", id, c.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }

    // resource budget: the whole gate in 10 minutes and 2 GB
    double elapsed = seconds_since(start);
    long hwm = vm_hwm_kb();
    bool budget_ok = elapsed <= 600.0 && hwm >= 0 && hwm <= 2 * 1024 * 1024;
    std::printf("[%s] 16. resource budget — %.1f s (limit 600), peak %ld kB (limit 2097152)\n",
                budget_ok ? "PASS" : "FAIL", elapsed, hwm);
    if (!budget_ok) ++failures;

    std::printf("%d/16 criteria passed\n", 16 - failures);
    return failures == 0 ? 0 : 1;
}
