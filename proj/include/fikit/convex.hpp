#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fikit/common.hpp"

namespace fikit {

/// v ↦ v^r / r on v ≥ 0, r > 1.  Closed form for the power family.
struct PowerForm {
    double exponent = 2.0;
    double value(double v) const;
    /// Conjugate exponent r' with 1/r + 1/r' = 1.
    double conjugate_exponent() const { return exponent / (exponent - 1.0); }
};

/// Piecewise-linear convex nondecreasing function sampled on an increasing
/// grid starting at 0 with value(0) = 0.  Evaluation beyond the last sample
/// extrapolates with the final slope.
struct TabulatedForm {
    std::vector<double> grid;
    std::vector<double> values;
    double slope_bound = 0.0;  // declared superlinearity witness

    double value(double v) const;
    double v_max() const { return grid.back(); }
};

/// Convex superlinear function on the nonnegative reals with value(0) = 0;
/// either a closed-form power or a tabulated sample.
class ConvexOneDim {
public:
    ConvexOneDim() : repr_(PowerForm{2.0}) {}
    explicit ConvexOneDim(PowerForm p);
    explicit ConvexOneDim(TabulatedForm t);  // validates invariants

    static ConvexOneDim power(double exponent) { return ConvexOneDim(PowerForm{exponent}); }
    static ConvexOneDim tabulated(std::vector<double> grid, std::vector<double> values,
                                  double slope_bound = 0.0);

    double value(double v) const;
    bool is_power() const { return std::holds_alternative<PowerForm>(repr_); }
    const PowerForm& as_power() const { return std::get<PowerForm>(repr_); }
    const TabulatedForm& as_tabulated() const { return std::get<TabulatedForm>(repr_); }

    std::uint64_t content_digest() const;

private:
    std::variant<PowerForm, TabulatedForm> repr_;
};

/// Hamiltonian H and Lagrangian L, dual under the 1D Legendre transform.
struct HamiltonianPair {
    ConvexOneDim H;
    ConvexOneDim L;
    std::string provenance;  // "closed-form dual" | "numeric legendre"

    double h(double w) const { return H.value(w); }
    double l(double v) const { return L.value(v); }

    /// Largest Young defect max(w·v − H(w) − L(v), 0) and the largest
    /// per-w equality gap min_v (H(w)+L(v) − w·v) over the cross grid.
    struct YoungCheck {
        double max_violation = 0.0;
        double max_equality_gap = 0.0;
    };
    YoungCheck check_young(const std::vector<double>& w_grid,
                           const std::vector<double>& v_grid) const;
};

/// H(v) = v^q/q paired with its conjugate L(u) = u^p/p, 1/p + 1/q = 1.
/// Requires 1 < q ≤ 2.
HamiltonianPair power_pair(double q);

/// Tabulated Legendre transform g(u) = max over grid v of (u·v − f(v)),
/// evaluated at u ranging over the same grid.  Throws DomainTruncationError
/// (naming u) when the maximizer for some u falls beyond the grid, i.e. when
/// u exceeds the end slope of f beyond one slope step.
ConvexOneDim legendre(const ConvexOneDim& f, const std::vector<double>& grid);

/// Uniform sample grid [0, v_max] with n points.
std::vector<double> uniform_grid(double v_max, int n);

}  // namespace fikit
