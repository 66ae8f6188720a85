#include "fikit/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace fikit {

std::string Digest::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return std::string(buf);
}

std::string to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Grid1d: return "grid1d";
        case SpaceKind::Grid2d: return "grid2d";
        case SpaceKind::Graph: return "graph";
        case SpaceKind::HeisenbergGrid: return "heisenberg_grid";
        case SpaceKind::Custom: return "custom";
    }
    return "custom";
}

SpaceKind space_kind_from_string(const std::string& s) {
    if (s == "grid1d") return SpaceKind::Grid1d;
    if (s == "grid2d") return SpaceKind::Grid2d;
    if (s == "graph") return SpaceKind::Graph;
    if (s == "heisenberg_grid" || s == "heisenberg") return SpaceKind::HeisenbergGrid;
    if (s == "custom") return SpaceKind::Custom;
    throw std::invalid_argument("unknown space kind: " + s);
}

MetricSpace MetricSpace::from_matrix(SpaceKind kind, int n, std::vector<double> dist,
                                     std::vector<double> coords, int coord_dim,
                                     std::vector<std::vector<int>> adjacency, double geo_tol) {
    MetricSpace s;
    s.kind = kind;
    s.n_ = n;
    s.dist_ = std::move(dist);
    s.coords_ = std::move(coords);
    s.coord_dim_ = coord_dim;
    s.adjacency_ = std::move(adjacency);
    s.geo_tol = geo_tol;
    s.witnessed_ = (kind == SpaceKind::Grid1d);
    return s;
}

std::vector<int> MetricSpace::geodesic_witnesses(int i, int j) const {
    std::vector<int> out;
    if (i == j) return out;
    if (kind == SpaceKind::Grid1d) {
        int lo = std::min(i, j), hi = std::max(i, j);
        for (int k = lo + 1; k < hi; ++k) out.push_back(k);
        return out;
    }
    if (!path_pred_.empty()) {
        // walk predecessors of the recorded shortest path from i to j
        int v = path_pred_[static_cast<std::size_t>(i) * n_ + j];
        while (v >= 0 && v != i) {
            out.push_back(v);
            v = path_pred_[static_cast<std::size_t>(i) * n_ + v];
        }
        std::reverse(out.begin(), out.end());
        return out;
    }
    if (kind == SpaceKind::Grid2d && coord_dim_ == 2) {
        // collinear lattice points between i and j, when any exist
        // (ids are row-major over the lattice; recover integer offsets)
        // Implemented via coordinates to stay layout-agnostic.
        double dx = coord(j, 0) - coord(i, 0);
        double dy = coord(j, 1) - coord(i, 1);
        double d = dist(i, j);
        if (d <= 0.0) return out;
        for (int k = 0; k < n_; ++k) {
            if (k == i || k == j) continue;
            double ax = coord(k, 0) - coord(i, 0);
            double ay = coord(k, 1) - coord(i, 1);
            double cross = ax * dy - ay * dx;
            double dot = ax * dx + ay * dy;
            if (std::abs(cross) <= 1e-12 * d * d && dot > 0.0 && dot < d * d) out.push_back(k);
        }
        return out;
    }
    return out;
}

double MetricSpace::diameter() const {
    double m = 0.0;
    for (double v : dist_) m = std::max(m, v);
    return m;
}

double MetricSpace::min_positive_dist() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : dist_)
        if (v > 0.0) m = std::min(m, v);
    return m;
}

double MetricSpace::grid_step() const {
    if (kind != SpaceKind::Grid1d || n_ < 2)
        throw std::invalid_argument("grid_step: not a 1D grid");
    return dist(0, 1);
}

std::uint64_t MetricSpace::content_digest() const {
    Digest d;
    d.add(to_string(kind)).add(n_).add(geo_tol);
    d.add(dist_);
    d.add(coords_);
    return d.value();
}

void ProbabilityMeasure::validate() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0))
            throw std::invalid_argument("measure weight " + std::to_string(i) + " is negative");
        sum += weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("measure weights sum to " + std::to_string(sum));
}

ProbabilityMeasure ProbabilityMeasure::normalized(std::vector<double> raw) {
    double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(sum > 0.0)) throw std::invalid_argument("cannot normalize: total mass is not positive");
    for (double& w : raw) w /= sum;
    ProbabilityMeasure mu{std::move(raw)};
    mu.validate();
    return mu;
}

void ScalarField::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("field value " + std::to_string(i) + " is not finite");
}

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

MetricSpace build_grid_1d(double a, double b, int n) {
    if (n < 2) throw std::invalid_argument("grid1d needs at least 2 points");
    if (!(a < b)) throw std::invalid_argument("grid1d needs a < b");
    double h = (b - a) / (n - 1);
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> coords(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        coords[i] = a + i * h;
        if (i > 0) adj[i].push_back(i - 1);
        if (i + 1 < n) adj[i].push_back(i + 1);
        for (int j = 0; j < n; ++j) dist[static_cast<std::size_t>(i) * n + j] = h * std::abs(i - j);
    }
    return MetricSpace::from_matrix(SpaceKind::Grid1d, n, std::move(dist), std::move(coords), 1,
                                    std::move(adj), 0.0);
}

MetricSpace build_grid_2d(double ax, double bx, int nx, double ay, double by, int ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid2d needs at least 2 points per axis");
    if (!(ax < bx) || !(ay < by)) throw std::invalid_argument("grid2d needs a < b on both axes");
    int n = nx * ny;
    double hx = (bx - ax) / (nx - 1);
    double hy = (by - ay) / (ny - 1);
    std::vector<double> coords(static_cast<std::size_t>(n) * 2);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    auto id = [nx](int ix, int iy) { return iy * nx + ix; };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            int k = id(ix, iy);
            coords[2 * k] = ax + ix * hx;
            coords[2 * k + 1] = ay + iy * hy;
            if (ix > 0) adj[k].push_back(id(ix - 1, iy));
            if (ix + 1 < nx) adj[k].push_back(id(ix + 1, iy));
            if (iy > 0) adj[k].push_back(id(ix, iy - 1));
            if (iy + 1 < ny) adj[k].push_back(id(ix, iy + 1));
        }
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dx = coords[2 * i] - coords[2 * j];
            double dy = coords[2 * i + 1] - coords[2 * j + 1];
            dist[static_cast<std::size_t>(i) * n + j] = std::hypot(dx, dy);
        }
    return MetricSpace::from_matrix(SpaceKind::Grid2d, n, std::move(dist), std::move(coords), 2,
                                    std::move(adj), 0.0);
}

namespace {

// Dijkstra with lowest-id predecessor tie-break; fills one row of the
// distance matrix and the predecessor table.
void dijkstra_row(int n, const std::vector<std::vector<std::pair<int, double>>>& g, int src,
                  std::vector<double>& dist_row, std::vector<int>& pred_row) {
    const double inf = std::numeric_limits<double>::infinity();
    dist_row.assign(static_cast<std::size_t>(n), inf);
    pred_row.assign(static_cast<std::size_t>(n), -1);
    dist_row[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, src});
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (auto [v, w] : g[u]) {
            double nd = d + w;
            if (nd < dist_row[v] - 1e-15 * (1.0 + std::abs(nd))) {
                dist_row[v] = nd;
                pred_row[v] = u;
                pq.push({nd, v});
            } else if (std::abs(nd - dist_row[v]) <= 1e-15 * (1.0 + std::abs(nd)) &&
                       pred_row[v] > u) {
                pred_row[v] = u;  // equal-length path through the lower id
            }
        }
    }
}

}  // namespace

MetricSpace build_graph(int n, const std::vector<GraphEdge>& edges) {
    if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
    std::vector<std::vector<std::pair<int, double>>> g(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (!(e.length > 0.0)) throw std::invalid_argument("edge lengths must be positive");
        if (e.u == e.v) continue;
        g[e.u].push_back({e.v, e.length});
        g[e.v].push_back({e.u, e.length});
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<int> preds(static_cast<std::size_t>(n) * n, -1);
    std::vector<double> row;
    std::vector<int> prow;
    for (int s = 0; s < n; ++s) {
        dijkstra_row(n, g, s, row, prow);
        for (int v = 0; v < n; ++v) {
            if (!std::isfinite(row[v]))
                throw MetricUndefinedError("graph is disconnected: no path from " +
                                           std::to_string(s) + " to " + std::to_string(v));
            dist[static_cast<std::size_t>(s) * n + v] = row[v];
            preds[static_cast<std::size_t>(s) * n + v] = prow[v];
        }
    }
    // enforce exact symmetry (per-source runs can differ in the last ulp)
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = dist[static_cast<std::size_t>(i) * n + j];
            dist[static_cast<std::size_t>(j) * n + i] = d;
        }
    auto space = MetricSpace::from_matrix(SpaceKind::Graph, n, std::move(dist), {}, 0,
                                          std::move(adj), 0.0);
    space.set_path_preds(std::move(preds));
    space.set_witnessed(false);  // no interior points inside edges
    return space;
}

MetricSpace build_heisenberg_grid(int levels, double step) {
    if (levels < 1) throw std::invalid_argument("heisenberg grid needs levels >= 1");
    if (!(step > 0.0)) throw std::invalid_argument("heisenberg grid needs step > 0");

    // Integer lattice keys (i, j, m) for the group element
    //   (x, y, z) = (i*step, j*step, m*step^2/2).
    // Right-multiplication by the four horizontal generators:
    //   X+:(i+1, j, m-j)  X-:(i-1, j, m+j)  Y+:(i, j+1, m+i)  Y-:(i, j-1, m-i)
    using Key = std::array<long long, 3>;
    std::map<Key, int> index;
    std::vector<Key> keys;
    std::vector<int> hops;
    keys.push_back({0, 0, 0});
    hops.push_back(0);
    index[{0, 0, 0}] = 0;
    auto moves_of = [](const Key& k) {
        return std::array<Key, 4>{Key{k[0] + 1, k[1], k[2] - k[1]}, Key{k[0] - 1, k[1], k[2] + k[1]},
                                  Key{k[0], k[1] + 1, k[2] + k[0]}, Key{k[0], k[1] - 1, k[2] - k[0]}};
    };
    for (std::size_t head = 0; head < keys.size(); ++head) {
        if (hops[head] == levels) continue;
        for (const Key& nk : moves_of(keys[head])) {
            if (index.find(nk) == index.end()) {
                index[nk] = static_cast<int>(keys.size());
                keys.push_back(nk);
                hops.push_back(hops[head] + 1);
            }
        }
    }
    int n = static_cast<int>(keys.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        for (const Key& nk : moves_of(keys[u])) {
            auto it = index.find(nk);
            if (it != index.end()) adj[u].push_back(it->second);
        }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    // graph metric over horizontal edges only: BFS from every point
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<int> preds(static_cast<std::size_t>(n) * n, -1);
    std::vector<int> hop(static_cast<std::size_t>(n));
    std::vector<int> prow(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        std::fill(hop.begin(), hop.end(), -1);
        std::fill(prow.begin(), prow.end(), -1);
        std::queue<int> q;
        hop[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u]) {
                if (hop[v] < 0) {
                    hop[v] = hop[u] + 1;
                    prow[v] = u;
                    q.push(v);
                } else if (hop[v] == hop[u] + 1 && prow[v] > u) {
                    prow[v] = u;  // lowest-id predecessor among shortest paths
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            if (hop[v] < 0)
                throw MetricUndefinedError("heisenberg lattice disconnected at point " +
                                           std::to_string(v));
            dist[static_cast<std::size_t>(s) * n + v] = step * hop[v];
            preds[static_cast<std::size_t>(s) * n + v] = prow[v];
        }
    }
    std::vector<double> coords(static_cast<std::size_t>(n) * 3);
    for (int k = 0; k < n; ++k) {
        coords[3 * k] = keys[k][0] * step;
        coords[3 * k + 1] = keys[k][1] * step;
        coords[3 * k + 2] = keys[k][2] * step * step / 2.0;
    }
    auto space = MetricSpace::from_matrix(SpaceKind::HeisenbergGrid, n, std::move(dist),
                                          std::move(coords), 3, std::move(adj), 0.0);
    space.set_path_preds(std::move(preds));
    space.set_witnessed(false);
    space.approximate = true;  // graph metric stands in for the CC distance
    return space;
}

// ---------------------------------------------------------------------------
// measures
// ---------------------------------------------------------------------------

ProbabilityMeasure gaussian_measure(const MetricSpace& space, double sigma,
                                    const std::vector<double>& center) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian measure needs sigma > 0");
    if (!space.has_coords())
        throw std::invalid_argument("gaussian measure needs a space with coordinates");
    if (static_cast<int>(center.size()) != space.coord_dim())
        throw std::invalid_argument("center dimension mismatch");
    int n = space.size();
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (int d = 0; d < space.coord_dim(); ++d) {
            double dx = space.coord(i, d) - center[d];
            r2 += dx * dx;
        }
        w[i] = std::exp(-r2 / (2.0 * sigma * sigma));
    }
    return ProbabilityMeasure::normalized(std::move(w));
}

ProbabilityMeasure gibbs_measure(const MetricSpace& space, int base, double beta, double p) {
    if (!(beta > 0.0)) throw std::invalid_argument("gibbs measure needs beta > 0");
    if (!(p >= 2.0)) throw std::invalid_argument("gibbs measure needs p >= 2");
    if (base < 0 || base >= space.size()) throw std::invalid_argument("base point out of range");
    int n = space.size();
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[i] = std::exp(-beta * std::pow(space.dist(base, i), p));
    return ProbabilityMeasure::normalized(std::move(w));
}

// ---------------------------------------------------------------------------
// field calculus
// ---------------------------------------------------------------------------

double lipschitz_constant(const ScalarField& f, const MetricSpace& space) {
    int n = space.size();
    if (f.size() != n) throw std::invalid_argument("field size mismatch");
    double lip = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = space.dist(i, j);
            if (d > 0.0) lip = std::max(lip, std::abs(f[i] - f[j]) / d);
        }
    return lip;
}

ScalarField metric_subgradient(const ScalarField& f, const MetricSpace& space,
                               Neighborhood nbhd) {
    int n = space.size();
    if (f.size() != n) throw std::invalid_argument("field size mismatch");
    ScalarField out(n, 0.0);
    auto rate = [&](int x, int y) {
        double d = space.dist(x, y);
        double drop = f[x] - f[y];
        return (drop > 0.0 && d > 0.0) ? drop / d : 0.0;
    };
    for (int x = 0; x < n; ++x) {
        double best = 0.0;
        bool any = false;
        switch (nbhd.mode) {
            case Neighborhood::Mode::Edges:
                for (int y : space.has_edges() ? space.neighbors(x) : std::vector<int>{}) {
                    any = true;
                    best = std::max(best, rate(x, y));
                }
                break;
            case Neighborhood::Mode::Global:
                for (int y = 0; y < n; ++y) {
                    if (y == x) continue;
                    any = true;
                    best = std::max(best, rate(x, y));
                }
                break;
            case Neighborhood::Mode::Radius:
                for (int y = 0; y < n; ++y) {
                    if (y == x || space.dist(x, y) > nbhd.radius) continue;
                    any = true;
                    best = std::max(best, rate(x, y));
                }
                break;
        }
        if (!any)
            throw std::invalid_argument("metric_subgradient: empty neighborhood at point " +
                                        std::to_string(x));
        out[x] = best;
    }
    return out;
}

void validate_metric(const MetricSpace& space) {
    int n = space.size();
    for (int i = 0; i < n; ++i) {
        if (space.dist(i, i) != 0.0)
            throw MetricUndefinedError("nonzero diagonal at point " + std::to_string(i));
        for (int j = 0; j < n; ++j) {
            if (space.dist(i, j) != space.dist(j, i))
                throw MetricUndefinedError("asymmetry at (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
            if (i != j && !(space.dist(i, j) > 0.0))
                throw MetricUndefinedError("non-positive distance at (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double dij = space.dist(i, j);
            for (int k = 0; k < n; ++k) {
                double lhs = space.dist(i, k);
                double rhs = dij + space.dist(j, k);
                if (lhs > rhs * (1.0 + 1e-9))
                    throw MetricUndefinedError("triangle inequality fails at (" +
                                               std::to_string(i) + "," + std::to_string(j) + "," +
                                               std::to_string(k) + ")");
            }
        }
    // witness defects (only spaces that can produce witnesses)
    if (n <= 800) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double dij = space.dist(i, j);
                for (int w : space.geodesic_witnesses(i, j)) {
                    double defect = std::abs(space.dist(i, w) + space.dist(w, j) - dij);
                    if (defect > space.geo_tol + 1e-12 * std::max(1.0, dij))
                        throw MetricUndefinedError("geodesic witness defect at (" +
                                                   std::to_string(i) + "," + std::to_string(j) +
                                                   ") via " + std::to_string(w));
                }
            }
    }
}

}  // namespace fikit
