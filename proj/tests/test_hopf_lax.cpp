#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fikit/convex.hpp"
#include "fikit/families.hpp"
#include "fikit/hopf_lax.hpp"
#include "fikit/space.hpp"

using namespace fikit;

namespace {

ScalarField abs_coordinate(const MetricSpace& s) {
    ScalarField g(s.size(), 0.0);
    for (int i = 0; i < s.size(); ++i) g[i] = std::abs(s.coord(i));
    return g;
}

// continuum infimum of (x-y)^2/(2t) + |y| over the whole line
double huber(double x, double t) {
    return std::abs(x) <= t ? x * x / (2 * t) : std::abs(x) - t / 2;
}

}  // namespace

TEST_CASE("quadratic flow of |x| matches the Huber envelope") {
    auto s = build_grid_1d(-2.0, 2.0, 401);
    auto g = abs_coordinate(s);
    auto L = ConvexOneDim::power(2.0);
    auto t0 = std::chrono::steady_clock::now();
    auto res = hopf_lax(s, g, 1.0, L);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(elapsed < 1.0);
    double worst = 0.0;
    for (int i = 0; i < s.size(); ++i)
        worst = std::max(worst, std::abs(res.u[i] - huber(s.coord(i), 1.0)));
    CHECK(worst <= 0.02);
    // the discrete minimum can only sit above the continuum infimum
    for (int i = 0; i < s.size(); ++i) CHECK(res.u[i] >= huber(s.coord(i), 1.0) - 1e-12);
}

TEST_CASE("linear initial data translates exactly on aligned grids") {
    auto s = build_grid_1d(-2.0, 2.0, 401);
    ScalarField g(s.size(), 0.0);
    for (int i = 0; i < s.size(); ++i) g[i] = s.coord(i);
    double t = 0.5;  // multiple of h, so the continuum minimizer is a grid point
    auto res = hopf_lax(s, g, t, ConvexOneDim::power(2.0));
    for (int i = 0; i < s.size(); ++i) {
        double x = s.coord(i);
        if (x - t < -2.0) continue;  // clipped by the boundary
        CHECK(res.u[i] == doctest::Approx(x - t / 2).epsilon(1e-12));
        CHECK(s.coord(res.argmin[i]) == doctest::Approx(x - t).epsilon(1e-12));
    }
}

TEST_CASE("flow never exceeds the initial data") {
    auto s = build_grid_1d(-1.0, 1.0, 101);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto g = random_lipschitz_field(s, 1.0, seed);
        for (double t : {0.1, 1.0, 10.0}) {
            auto res = hopf_lax(s, g, t, ConvexOneDim::power(2.0));
            for (int i = 0; i < s.size(); ++i) CHECK(res.u[i] <= g[i] + 1e-15);
        }
    }
}

TEST_CASE("tiny time returns the initial data exactly") {
    // min over y != x of d^2/(2t) >= h^2/(2t) = 0.02^2/0.0002 = 2 > lip·diam drop
    auto s = build_grid_1d(-1.0, 1.0, 101);
    auto g = random_lipschitz_field(s, 1.0, 5);
    auto res = hopf_lax(s, g, 1e-4, ConvexOneDim::power(2.0));
    for (int i = 0; i < s.size(); ++i) {
        CHECK(res.u[i] == g[i]);
        CHECK(res.argmin[i] == i);
    }
}

TEST_CASE("argmin ties break to the lowest index") {
    // symmetric tent: y=0 and y=2 give identical objective at x=1
    auto s = build_grid_1d(0.0, 2.0, 3);
    ScalarField g({0.0, 10.0, 0.0});
    auto res = hopf_lax(s, g, 1.0, ConvexOneDim::power(2.0));
    CHECK(res.argmin[1] == 0);
}

TEST_CASE("rejects nonpositive time") {
    auto s = build_grid_1d(0.0, 1.0, 11);
    ScalarField g(s.size(), 0.0);
    CHECK_THROWS_AS(hopf_lax(s, g, 0.0, ConvexOneDim::power(2.0)), std::invalid_argument);
    CHECK_THROWS_AS(hopf_lax(s, g, -1.0, ConvexOneDim::power(2.0)), std::invalid_argument);
}

TEST_CASE("one-sided semigroup bound holds on every space kind") {
    auto L = ConvexOneDim::power(2.0);
    std::vector<MetricSpace> spaces;
    spaces.push_back(build_grid_1d(-1.0, 1.0, 81));
    spaces.push_back(build_grid_2d(0.0, 1.0, 7, 0.0, 1.0, 7));
    spaces.push_back(build_heisenberg_grid(3, 0.5));
    for (const auto& s : spaces) {
        for (std::uint64_t seed : {11u, 12u}) {
            auto g = random_lipschitz_field(s, 1.0, seed);
            auto r = semigroup_check(s, g, 0.4, 1.0, L);
            CHECK(r.pass);
            CHECK(r.lhs <= 1e-12);
        }
    }
}

TEST_CASE("two-sided semigroup defect is a grid effect of order h") {
    auto L = ConvexOneDim::power(2.0);
    auto coarse = build_grid_1d(-2.0, 2.0, 401);
    SemigroupOptions opts;
    opts.two_sided_tol = 5.0 * coarse.grid_step();
    auto r1 = semigroup_check(coarse, abs_coordinate(coarse), 0.5, 1.0, L, opts);
    CHECK(r1.pass);
    double defect1 = r1.constants.at("two_sided_defect");
    CHECK(defect1 <= 5.0 * coarse.grid_step());

    auto fine = build_grid_1d(-2.0, 2.0, 801);
    auto r2 = semigroup_check(fine, abs_coordinate(fine), 0.5, 1.0, L);
    double defect2 = r2.constants.at("two_sided_defect");
    CHECK(defect1 / defect2 >= 1.8);
}

TEST_CASE("flow is monotone in time") {
    auto s = build_grid_1d(-1.0, 1.0, 101);
    auto L = ConvexOneDim::power(2.0);
    for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
        auto g = random_lipschitz_field(s, 1.0, seed);
        auto r = monotonicity_check(s, g, {0.25, 0.5, 1.0, 2.0}, L);
        CHECK(r.pass);
        CHECK(r.lhs <= 1e-12);
    }
}

TEST_CASE("space and time Lipschitz bounds") {
    auto s = build_grid_1d(-1.0, 1.0, 201);
    auto pair = power_pair(2.0);
    for (std::uint64_t seed : {31u, 32u, 33u, 34u, 35u}) {
        auto g = random_lipschitz_field(s, 1.0, seed);
        auto r = lipschitz_bound_check(s, g, 1.0, 0.5, pair);
        CHECK(r.pass);
        double lip_g = r.constants.at("lip_g");
        CHECK(r.constants.at("lip_u") <= lip_g * (1.0 + 1e-9));
        CHECK(r.constants.at("time_diff") <= pair.h(lip_g) * 0.5 * (1.0 + 1e-9));
    }
}

TEST_CASE("rescaling identity is exact") {
    auto s = build_grid_1d(-1.0, 1.0, 101);
    for (std::uint64_t seed : {41u, 42u}) {
        auto g = random_lipschitz_field(s, 1.0, seed);
        for (double q : {1.5, 2.0}) {
            for (double eps : {0.5, 2.0}) {
                auto r = scaling_check(s, g, 0.8, eps, q);
                CHECK(r.pass);
                CHECK(r.lhs <= 1e-10);
            }
        }
    }
}

TEST_CASE("time derivative is nonpositive") {
    auto s = build_grid_1d(-1.0, 1.0, 101);
    auto g = random_lipschitz_field(s, 1.0, 51);
    auto dt = time_derivative(s, g, 0.5, 0.01, ConvexOneDim::power(2.0));
    for (int i = 0; i < s.size(); ++i) CHECK(dt[i] <= 1e-12);
}

TEST_CASE("one-sided residual floor stays within tol and tightens with h") {
    auto pair = power_pair(2.0);
    double t = 1.0;
    // the global-subgradient floor is negative only through the O(h/2)
    // underestimate of the gradient, so it must sit above -lip*h and halve
    // along with the grid step
    auto floor_at = [&](int n, double delta) {
        auto s = build_grid_1d(-2.0, 2.0, n);
        auto g = abs_coordinate(s);
        auto stats = hj_residual(s, g, t, pair, delta);
        CHECK(stats.report.pass);
        CHECK(stats.report.constants.at("floor_global") >=
              -stats.report.constants.at("tol"));

        // oracle: recompute the floor from primitives
        auto fd = time_derivative(s, g, t, delta, pair.L);
        auto ut = hopf_lax(s, g, t, pair.L);
        auto grad_glob = metric_subgradient(ut.u, s, Neighborhood::global());
        double floor = 0.0;
        for (int i = 0; i < s.size(); ++i)
            floor = std::min(floor, fd[i] + pair.h(grad_glob[i]));
        CHECK(floor == doctest::Approx(stats.report.constants.at("floor_global")));
        return floor;
    };
    double coarse = floor_at(201, 0.05);  // h = 0.02
    double fine = floor_at(401, 0.05);    // h = 0.01
    CHECK(coarse >= -0.02);
    CHECK(fine >= -0.01);
    CHECK(fine >= coarse * 0.75);  // defect shrinks roughly like h
}

TEST_CASE("residual shrinks under grid refinement") {
    auto pair = power_pair(2.0);
    double t = 1.0;
    auto coarse = build_grid_1d(-2.0, 2.0, 201);   // h = 0.02
    auto fine = build_grid_1d(-2.0, 2.0, 401);     // h = 0.01
    auto rc = hj_residual(coarse, abs_coordinate(coarse), t, pair, 0.02);
    auto rf = hj_residual(fine, abs_coordinate(fine), t, pair, 0.01);
    CHECK(rc.report.pass);
    CHECK(rf.report.pass);
    CHECK(rc.max_abs_interior / rf.max_abs_interior >= 1.5);
}

TEST_CASE("thread count does not change results") {
    auto s = build_grid_1d(-2.0, 2.0, 801);
    auto g = random_lipschitz_field(s, 1.0, 61);
    auto L = ConvexOneDim::power(2.0);
    auto seq = hopf_lax(s, g, 0.7, L);
    setenv("FIKIT_THREADS", "4", 1);
    auto par = hopf_lax(s, g, 0.7, L);
    unsetenv("FIKIT_THREADS");
    for (int i = 0; i < s.size(); ++i) {
        CHECK(seq.u[i] == par.u[i]);
        CHECK(seq.argmin[i] == par.argmin[i]);
    }
}
