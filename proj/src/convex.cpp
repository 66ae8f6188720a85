#include "fikit/convex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fikit {

double PowerForm::value(double v) const {
    if (v < 0.0) throw std::domain_error("power form evaluated at negative argument");
    return std::pow(v, exponent) / exponent;
}

double TabulatedForm::value(double v) const {
    if (v < 0.0) throw std::domain_error("tabulated form evaluated at negative argument");
    if (v >= grid.back()) {
        std::size_t m = grid.size();
        double s = (values[m - 1] - values[m - 2]) / (grid[m - 1] - grid[m - 2]);
        return values[m - 1] + s * (v - grid.back());
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), v);
    std::size_t k = static_cast<std::size_t>(it - grid.begin());
    if (k == 0) return values[0];
    double t = (v - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return values[k - 1] + t * (values[k] - values[k - 1]);
}

ConvexOneDim::ConvexOneDim(PowerForm p) : repr_(p) {
    if (!(p.exponent > 1.0)) throw std::invalid_argument("power exponent must exceed 1");
}

ConvexOneDim::ConvexOneDim(TabulatedForm t) : repr_(std::move(t)) {
    const auto& f = std::get<TabulatedForm>(repr_);
    if (f.grid.size() < 3 || f.grid.size() != f.values.size())
        throw std::invalid_argument("tabulated form needs at least 3 matching samples");
    if (f.grid.front() != 0.0 || f.values.front() != 0.0)
        throw std::invalid_argument("tabulated form must start at (0, 0)");
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < f.grid.size(); ++k) {
        double dv = f.grid[k] - f.grid[k - 1];
        if (!(dv > 0.0)) throw std::invalid_argument("tabulated grid must be increasing");
        double s = (f.values[k] - f.values[k - 1]) / dv;
        if (s < prev_slope - 1e-12 * std::max(1.0, std::abs(s)))
            throw std::invalid_argument("tabulated values are not convex");
        if (s < -1e-12) throw std::invalid_argument("tabulated values are not nondecreasing");
        prev_slope = s;
    }
}

ConvexOneDim ConvexOneDim::tabulated(std::vector<double> grid, std::vector<double> values,
                                     double slope_bound) {
    TabulatedForm t{std::move(grid), std::move(values), slope_bound};
    return ConvexOneDim(std::move(t));
}

double ConvexOneDim::value(double v) const {
    return std::visit([v](const auto& f) { return f.value(v); }, repr_);
}

std::uint64_t ConvexOneDim::content_digest() const {
    Digest d;
    if (is_power()) {
        d.add(std::string("power")).add(as_power().exponent);
    } else {
        const auto& t = as_tabulated();
        d.add(std::string("tabulated")).add(t.grid).add(t.values).add(t.slope_bound);
    }
    return d.value();
}

HamiltonianPair::YoungCheck HamiltonianPair::check_young(const std::vector<double>& w_grid,
                                                         const std::vector<double>& v_grid) const {
    YoungCheck out;
    double worst_gap = 0.0;
    for (double w : w_grid) {
        double hw = h(w);
        double gap = std::numeric_limits<double>::infinity();
        for (double v : v_grid) {
            double slack = hw + l(v) - w * v;
            out.max_violation = std::max(out.max_violation, -slack);
            gap = std::min(gap, slack);
        }
        worst_gap = std::max(worst_gap, gap);
    }
    out.max_equality_gap = worst_gap;
    return out;
}

HamiltonianPair power_pair(double q) {
    if (!(q > 1.0 && q <= 2.0))
        throw UnsupportedError("power pair requires an exponent in (1, 2], got " +
                               std::to_string(q));
    double p = q / (q - 1.0);
    HamiltonianPair pair;
    pair.H = ConvexOneDim::power(q);
    pair.L = ConvexOneDim::power(p);
    pair.provenance = "closed-form dual";
    return pair;
}

ConvexOneDim legendre(const ConvexOneDim& f, const std::vector<double>& grid) {
    if (grid.size() < 3) throw std::invalid_argument("legendre needs at least 3 grid points");
    std::size_t m = grid.size();
    std::vector<double> fv(m);
    for (std::size_t k = 0; k < m; ++k) fv[k] = f.value(grid[k]);
    // end-slope estimate for the sampled function: last chord slope plus half
    // the final slope increment (chord slopes sit at segment midpoints)
    double s_last = (fv[m - 1] - fv[m - 2]) / (grid[m - 1] - grid[m - 2]);
    double s_prev = (fv[m - 2] - fv[m - 3]) / (grid[m - 2] - grid[m - 3]);
    double end_slope = s_last + 0.5 * (s_last - s_prev);

    std::vector<double> out(m);
    for (std::size_t iu = 0; iu < m; ++iu) {
        double u = grid[iu];
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t k = 0; k < m; ++k) {
            double cand = u * grid[k] - fv[k];
            if (cand > best) {
                best = cand;
                arg = k;
            }
        }
        if (arg == m - 1 && u > end_slope * (1.0 + 1e-9) + 1e-12) {
            std::ostringstream msg;
            msg << "legendre maximizer for u = " << u << " lies beyond the sample grid (end slope "
                << end_slope << "); extend the grid past v = " << grid.back();
            throw DomainTruncationError(msg.str());
        }
        out[iu] = best;
    }
    // conjugate of a convex function through (0,0): clamp tiny negative noise
    if (out[0] < 0.0 && out[0] > -1e-15) out[0] = 0.0;
    return ConvexOneDim::tabulated(std::vector<double>(grid), std::move(out), end_slope);
}

std::vector<double> uniform_grid(double v_max, int n) {
    if (n < 2 || !(v_max > 0.0)) throw std::invalid_argument("uniform_grid needs n >= 2, v_max > 0");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[k] = v_max * k / (n - 1);
    return g;
}

}  // namespace fikit
