#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fikit/common.hpp"

namespace fikit {

enum class SpaceKind { Grid1d, Grid2d, Graph, HeisenbergGrid, Custom };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& s);

struct GraphEdge {
    int u = 0;
    int v = 0;
    double length = 0.0;
};

/// Finite point set with a certified metric.  Distances are stored as a
/// dense symmetric matrix; adjacency (when the space was built from a grid
/// or graph) drives the "edges" neighborhood of the metric subgradient.
class MetricSpace {
public:
    SpaceKind kind = SpaceKind::Custom;
    double geo_tol = 0.0;
    bool approximate = false;  // metric is an uncertified approximation

    int size() const { return n_; }
    double dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
    double& dist_ref(int i, int j) { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<double>& dist_matrix() const { return dist_; }

    bool has_coords() const { return !coords_.empty(); }
    int coord_dim() const { return coord_dim_; }
    /// Coordinate tuple of point i (empty span when the space has none).
    const double* coords(int i) const { return coords_.data() + static_cast<std::size_t>(i) * coord_dim_; }
    double coord(int i, int d = 0) const { return coords_[static_cast<std::size_t>(i) * coord_dim_ + d]; }

    const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
    bool has_edges() const { return !adjacency_.empty(); }

    /// True when interior points of shortest paths are available, which is
    /// what the two-sided semigroup and residual checks require.
    bool has_geodesic_witnesses() const { return witnessed_; }

    /// Interior points of one shortest path between i and j (empty for
    /// adjacent or identical points, or when the space carries no witnesses).
    std::vector<int> geodesic_witnesses(int i, int j) const;

    double diameter() const;
    double min_positive_dist() const;

    /// Uniform grid step for Grid1d spaces.
    double grid_step() const;

    std::uint64_t content_digest() const;

    // --- construction helpers used by the builders and the loader ---
    static MetricSpace from_matrix(SpaceKind kind, int n, std::vector<double> dist,
                                   std::vector<double> coords, int coord_dim,
                                   std::vector<std::vector<int>> adjacency, double geo_tol);

    // Witness plumbing (set by builders).
    void set_path_preds(std::vector<int> preds) { path_pred_ = std::move(preds); witnessed_ = true; }
    void set_witnessed(bool w) { witnessed_ = w; }
    void attach_coords(std::vector<double> coords, int dim) {
        coords_ = std::move(coords);
        coord_dim_ = dim;
    }

private:
    int n_ = 0;
    int coord_dim_ = 0;
    std::vector<double> dist_;    // n*n row-major, symmetric
    std::vector<double> coords_;  // n*coord_dim, optional
    std::vector<std::vector<int>> adjacency_;
    // path_pred_[s*n + v] = predecessor of v on the chosen shortest path from s
    // (lowest-id tie-break); empty unless the builder recorded paths.
    std::vector<int> path_pred_;
    bool witnessed_ = false;
};

/// Per-point nonnegative weights summing to one.
struct ProbabilityMeasure {
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
    double operator[](int i) const { return weights[i]; }
    void validate() const;  // throws std::invalid_argument on violation
    static ProbabilityMeasure normalized(std::vector<double> raw);
};

/// Per-point real values (initial data, densities, solutions).
struct ScalarField {
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(std::vector<double> v) : values(std::move(v)) {}
    ScalarField(int n, double fill) : values(static_cast<std::size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }
    void validate() const;  // all values finite
};

// --- builders ---

MetricSpace build_grid_1d(double a, double b, int n);
MetricSpace build_grid_2d(double ax, double bx, int nx, double ay, double by, int ny);
MetricSpace build_graph(int n, const std::vector<GraphEdge>& edges);
MetricSpace build_heisenberg_grid(int levels, double step);

// --- measures ---

ProbabilityMeasure gaussian_measure(const MetricSpace& space, double sigma,
                                    const std::vector<double>& center);
ProbabilityMeasure gibbs_measure(const MetricSpace& space, int base, double beta, double p);

// --- field calculus ---

double lipschitz_constant(const ScalarField& f, const MetricSpace& space);

struct Neighborhood {
    enum class Mode { Edges, Global, Radius } mode = Mode::Edges;
    double radius = 0.0;

    static Neighborhood edges() { return {Mode::Edges, 0.0}; }
    static Neighborhood global() { return {Mode::Global, 0.0}; }
    static Neighborhood within(double r) { return {Mode::Radius, r}; }
};

/// Discrete metric subgradient |∇⁻f|: at each x the largest decrease rate
/// max_y [f(x)-f(y)]_+ / d(x,y) over the admissible neighborhood.
ScalarField metric_subgradient(const ScalarField& f, const MetricSpace& space,
                               Neighborhood nbhd = Neighborhood::edges());

/// Full metric certification: zero diagonal, exact symmetry, positivity,
/// triangle inequality within 1e-9 relative, witness defects within geo_tol.
/// Throws MetricUndefinedError naming the first offending points.
void validate_metric(const MetricSpace& space);

}  // namespace fikit
