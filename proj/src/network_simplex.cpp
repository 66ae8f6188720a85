#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fikit/common.hpp"

namespace fikit::detail {

namespace {

// Nodes 0..m-1 are sources, m..m+k-1 targets.  Basic arcs form a spanning
// tree; arc e = i*k + j is oriented source -> target.
struct Tree {
    int m = 0, k = 0;
    std::vector<int> parent;      // node -> node (-1 at root)
    std::vector<long> parent_arc; // node -> arc id to parent
    std::vector<int> depth;
    std::vector<double> pi;       // node potentials, rc(e) = c - pi[tail] + pi[head]

    int nodes() const { return m + k; }
};

// Rebuilds parent/depth/pi from the basic-arc list by DFS from node 0.
void rebuild(Tree& t, const std::vector<long>& basic, const std::vector<double>& cost) {
    int n = t.nodes();
    std::vector<std::vector<std::pair<int, long>>> adj(static_cast<std::size_t>(n));
    for (long e : basic) {
        int i = static_cast<int>(e / t.k);
        int j = t.m + static_cast<int>(e % t.k);
        adj[i].push_back({j, e});
        adj[j].push_back({i, e});
    }
    t.parent.assign(static_cast<std::size_t>(n), -2);
    t.parent_arc.assign(static_cast<std::size_t>(n), -1);
    t.depth.assign(static_cast<std::size_t>(n), 0);
    t.pi.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<int> stack{0};
    t.parent[0] = -1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (auto [y, e] : adj[x]) {
            if (t.parent[y] != -2) continue;
            t.parent[y] = x;
            t.parent_arc[y] = e;
            t.depth[y] = t.depth[x] + 1;
            // tree arcs have zero reduced cost: cost = pi[tail] - pi[head]
            bool x_is_tail = x < t.m;
            t.pi[y] = x_is_tail ? t.pi[x] - cost[e] : t.pi[x] + cost[e];
            stack.push_back(y);
        }
    }
    for (int x = 0; x < n; ++x)
        if (t.parent[x] == -2)
            throw std::logic_error("transportation basis lost connectivity");
}

}  // namespace

SimplexSolution solve_transportation(const std::vector<double>& supply,
                                     const std::vector<double>& demand,
                                     const std::vector<double>& cost) {
    int m = static_cast<int>(supply.size());
    int k = static_cast<int>(demand.size());
    if (m == 0 || k == 0) throw std::invalid_argument("empty transportation instance");
    if (cost.size() != static_cast<std::size_t>(m) * k)
        throw std::invalid_argument("cost size mismatch");
    for (double a : supply)
        if (!(a > 0.0)) throw std::invalid_argument("supplies must be positive");
    for (double b : demand)
        if (!(b > 0.0)) throw std::invalid_argument("demands must be positive");

    std::vector<double> flow(cost.size(), 0.0);
    std::vector<char> in_basis(cost.size(), 0);
    std::vector<long> basic;
    basic.reserve(static_cast<std::size_t>(m + k - 1));

    // northwest-corner start: m+k-1 basic arcs forming a spanning tree
    {
        std::vector<double> ra = supply, rb = demand;
        int i = 0, j = 0;
        while (true) {
            long e = static_cast<long>(i) * k + j;
            double x = std::min(ra[i], rb[j]);
            flow[e] = x;
            in_basis[e] = 1;
            basic.push_back(e);
            ra[i] -= x;
            rb[j] -= x;
            if (i == m - 1 && j == k - 1) break;
            // advance exactly one index; ties keep the row active so the
            // basis stays a tree (the next arc enters with zero flow)
            if (ra[i] <= rb[j] && i < m - 1) {
                ra[i] = 0.0;
                ++i;
            } else {
                rb[j] = 0.0;
                ++j;
            }
        }
    }

    Tree tree;
    tree.m = m;
    tree.k = k;
    rebuild(tree, basic, cost);

    double cost_scale = 1.0;
    for (double c : cost) cost_scale = std::max(cost_scale, std::abs(c));
    const double eps_rc = 1e-12 * cost_scale;

    long total_arcs = static_cast<long>(m) * k;
    long block = std::max<long>(64, static_cast<long>(std::sqrt(static_cast<double>(total_arcs))));
    long scan_from = 0;
    const long pivot_cap = 2000 + 200L * (m + k);
    SimplexSolution sol;

    std::vector<long> cycle_minus;  // arcs losing flow, for the ratio test
    while (true) {
        // block pricing: first block (cyclically) containing an improving
        // arc supplies the entering arc (most negative within the block)
        long enter = -1;
        double best_rc = -eps_rc;
        long scanned = 0;
        long pos = scan_from;
        while (scanned < total_arcs) {
            long stop = std::min<long>(block, total_arcs - scanned);
            for (long s = 0; s < stop; ++s) {
                long e = pos;
                if (++pos == total_arcs) pos = 0;
                if (in_basis[e]) continue;
                int i = static_cast<int>(e / k);
                int j = m + static_cast<int>(e % k);
                double rc = cost[e] - tree.pi[i] + tree.pi[j];
                if (rc < best_rc) {
                    best_rc = rc;
                    enter = e;
                }
            }
            scanned += stop;
            if (enter >= 0) break;
        }
        if (enter < 0) break;  // optimal
        if (++sol.pivots > pivot_cap)
            throw CertificationFailureError(
                "transportation simplex exceeded its pivot cap (" + std::to_string(pivot_cap) +
                ") before certifying optimality");
        scan_from = pos;

        // entering arc closes one cycle through the tree
        int a = static_cast<int>(enter / k);           // tail (source)
        int b = m + static_cast<int>(enter % k);       // head (target)
        cycle_minus.clear();
        double delta = std::numeric_limits<double>::infinity();
        long leave = -1;
        // Pushing delta along enter (a -> b) returns through the tree path
        // b .. lca .. a.  Walking b upward traverses arcs in cycle
        // direction; walking a upward traverses them against it.
        int x = b, y = a;
        // First pass: find the bottleneck
        {
            int bx = x, by = y;
            while (bx != by) {
                if (tree.depth[bx] >= tree.depth[by]) {
                    long e = tree.parent_arc[bx];
                    bool along = (bx < m);  // traversal bx->parent matches arc iff bx is its tail
                    if (!along && flow[e] < delta) {
                        delta = flow[e];
                        leave = e;
                    } else if (!along && flow[e] == delta && leave < 0) {
                        leave = e;
                    }
                    bx = tree.parent[bx];
                } else {
                    long e = tree.parent_arc[by];
                    // traversal parent->by matches arc orientation iff by is its head
                    bool along = (by >= m);
                    if (!along && flow[e] < delta) {
                        delta = flow[e];
                        leave = e;
                    } else if (!along && flow[e] == delta && leave < 0) {
                        leave = e;
                    }
                    by = tree.parent[by];
                }
            }
        }
        if (leave < 0)
            throw std::logic_error("transportation cycle without a leaving arc");
        // Second pass: apply the flow change
        while (x != y) {
            if (tree.depth[x] >= tree.depth[y]) {
                long e = tree.parent_arc[x];
                flow[e] += (x < m) ? delta : -delta;
                x = tree.parent[x];
            } else {
                long e = tree.parent_arc[y];
                flow[e] += (y >= m) ? delta : -delta;
                y = tree.parent[y];
            }
        }
        flow[enter] = delta;
        flow[leave] = 0.0;
        in_basis[enter] = 1;
        in_basis[leave] = 0;
        for (auto& e : basic)
            if (e == leave) {
                e = enter;
                break;
            }
        rebuild(tree, basic, cost);
    }

    // duals: u_i + v_j <= cost with equality on basic arcs
    sol.u.assign(static_cast<std::size_t>(m), 0.0);
    sol.v.assign(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < m; ++i) sol.u[i] = tree.pi[i];
    for (int j = 0; j < k; ++j) sol.v[j] = -tree.pi[m + j];
    double primal = 0.0, pc = 0.0;
    for (std::size_t e = 0; e < flow.size(); ++e) {
        if (flow[e] == 0.0) continue;
        if (flow[e] < 0.0) flow[e] = 0.0;  // FP drift from cycle updates
        double term = cost[e] * flow[e] - pc;
        double s = primal + term;
        pc = (s - primal) - term;
        primal = s;
    }
    double dual = 0.0, dc = 0.0;
    for (int i = 0; i < m; ++i) {
        double term = supply[i] * sol.u[i] - dc;
        double s = dual + term;
        dc = (s - dual) - term;
        dual = s;
    }
    for (int j = 0; j < k; ++j) {
        double term = demand[j] * sol.v[j] - dc;
        double s = dual + term;
        dc = (s - dual) - term;
        dual = s;
    }
    sol.flow = std::move(flow);
    sol.primal = primal;
    sol.dual = dual;
    return sol;
}

}  // namespace fikit::detail
