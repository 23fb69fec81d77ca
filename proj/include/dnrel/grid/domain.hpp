#pragma once

#include "dnrel/relcore/linalg.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dnrel::grid {

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LatticePoint {
    int x = 0;
    int y = 0;
    auto operator<=>(const LatticePoint&) const = default;
};

using Edge = std::pair<Index, Index>;

/// Node set with nearest-neighbour edges and an interior/boundary flag per
/// node. Construction rejects geometries without interior or boundary nodes,
/// with a disconnected interior, or with isolated nodes.
class GridDomain {
public:
    GridDomain(double h, std::vector<LatticePoint> nodes, std::vector<Edge> edges,
               std::vector<bool> boundary, std::string descriptor = "custom")
        : h_(h), nodes_(std::move(nodes)), edges_(std::move(edges)), boundary_(std::move(boundary)),
          descriptor_(std::move(descriptor))
    {
        validate();
        for (Index i = 0; i < node_count(); ++i)
            (boundary_[static_cast<std::size_t>(i)] ? boundary_idx_ : interior_idx_).push_back(i);
    }

    double h() const { return h_; }
    Index node_count() const { return static_cast<Index>(nodes_.size()); }
    const std::vector<LatticePoint>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool is_boundary(Index i) const { return boundary_[static_cast<std::size_t>(i)]; }
    const std::vector<Index>& interior() const { return interior_idx_; }
    const std::vector<Index>& boundary() const { return boundary_idx_; }
    const std::string& descriptor() const { return descriptor_; }

    /// Physical coordinates (x h, y h) of node i.
    std::pair<double, double> position(Index i) const
    {
        const auto& p = nodes_[static_cast<std::size_t>(i)];
        return {p.x * h_, p.y * h_};
    }

private:
    void validate() const
    {
        if (!(h_ > 0.0)) throw GeometryError("grid spacing h must be positive");
        const auto n = nodes_.size();
        if (boundary_.size() != n) throw GeometryError("boundary flags do not match node count");
        std::vector<std::vector<std::size_t>> adj(n);
        for (const auto& [a, b] : edges_) {
            if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n || a == b)
                throw GeometryError("invalid edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
            adj[static_cast<std::size_t>(a)].push_back(static_cast<std::size_t>(b));
            adj[static_cast<std::size_t>(b)].push_back(static_cast<std::size_t>(a));
        }
        const auto n_b = static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), true));
        if (n_b == n) throw GeometryError("domain has no interior node");
        if (n_b == 0) throw GeometryError("domain has no boundary node");
        for (std::size_t i = 0; i < n; ++i)
            if (adj[i].empty()) throw GeometryError("node " + std::to_string(i) + " has no neighbour");

        // Interior nodes must form one connected component.
        std::vector<char> seen(n, 0);
        std::size_t start = 0;
        while (boundary_[start]) ++start;
        std::queue<std::size_t> q;
        q.push(start);
        seen[start] = 1;
        std::size_t reached = 1;
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            for (auto w : adj[v])
                if (!boundary_[w] && !seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    q.push(w);
                }
        }
        if (reached != n - n_b) throw GeometryError("interior nodes are not connected");
    }

    double h_;
    std::vector<LatticePoint> nodes_;
    std::vector<Edge> edges_;
    std::vector<bool> boundary_;
    std::string descriptor_;
    std::vector<Index> interior_idx_;
    std::vector<Index> boundary_idx_;
};

/// (nx+1) x (ny+1) lattice, perimeter nodes on the boundary, 4-neighbour
/// edges. Node (i, j) has index j (nx+1) + i.
inline GridDomain build_rectangle(int nx, int ny, double h)
{
    if (nx < 2 || ny < 2) throw GeometryError("rectangle needs nx, ny >= 2");
    std::vector<LatticePoint> nodes;
    std::vector<bool> boundary;
    std::vector<Edge> edges;
    const auto id = [nx](int i, int j) { return static_cast<Index>(j) * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            nodes.push_back({i, j});
            boundary.push_back(i == 0 || j == 0 || i == nx || j == ny);
            if (i < nx) edges.emplace_back(id(i, j), id(i + 1, j));
            if (j < ny) edges.emplace_back(id(i, j), id(i, j + 1));
        }
    return GridDomain(h, std::move(nodes), std::move(edges), std::move(boundary),
                      "rectangle " + std::to_string(nx) + "x" + std::to_string(ny));
}

/// Path graph on n_nodes nodes; the two endpoints are the boundary.
inline GridDomain build_chain(int n_nodes, double h)
{
    if (n_nodes < 4) throw GeometryError("chain needs at least 4 nodes");
    std::vector<LatticePoint> nodes;
    std::vector<bool> boundary;
    std::vector<Edge> edges;
    for (int i = 0; i < n_nodes; ++i) {
        nodes.push_back({i, 0});
        boundary.push_back(i == 0 || i == n_nodes - 1);
        if (i + 1 < n_nodes) edges.emplace_back(i, i + 1);
    }
    return GridDomain(h, std::move(nodes), std::move(edges), std::move(boundary),
                      "chain " + std::to_string(n_nodes));
}

using CellMask = std::vector<std::vector<bool>>;

/// Domain made of the unit cells flagged in `mask` (mask[row][col], row = y).
/// Nodes are the cell corners, ordered by (y, x); edges are cell sides; a node
/// is on the boundary iff it lies on a side shared with exactly one true cell.
inline GridDomain build_masked(const CellMask& mask, double h)
{
    const int rows = static_cast<int>(mask.size());
    const int cols = rows > 0 ? static_cast<int>(mask[0].size()) : 0;
    for (const auto& r : mask)
        if (static_cast<int>(r.size()) != cols) throw GeometryError("mask rows differ in length");
    const auto cell = [&](int r, int c) {
        return r >= 0 && c >= 0 && r < rows && c < cols && mask[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    };

    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (cell(r, c)) cells.emplace_back(r, c);
    if (cells.empty()) throw GeometryError("mask has no cells");

    // Edge-connectivity of the cells.
    std::map<std::pair<int, int>, bool> visited;
    std::queue<std::pair<int, int>> q;
    q.push(cells.front());
    visited[cells.front()] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
        auto [r, c] = q.front();
        q.pop();
        const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            std::pair<int, int> nb{r + dr[k], c + dc[k]};
            if (cell(nb.first, nb.second) && !visited[nb]) {
                visited[nb] = true;
                ++reached;
                q.push(nb);
            }
        }
    }
    if (reached != cells.size()) throw GeometryError("mask cells are not edge-connected");

    std::map<LatticePoint, Index> index;
    for (auto [r, c] : cells)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) index.emplace(LatticePoint{c + dx, r + dy}, 0);
    std::vector<LatticePoint> nodes;
    // std::map orders by (x, y); renumber in (y, x) order.
    for (const auto& kv : index) nodes.push_back(kv.first);
    std::sort(nodes.begin(), nodes.end(),
              [](const LatticePoint& a, const LatticePoint& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<Index>(i);

    std::vector<bool> boundary(nodes.size(), false);
    std::vector<Edge> edges;
    for (const auto& p : nodes) {
        // Horizontal side p -> p + (1, 0) borders cells (p.y - 1, p.x) and (p.y, p.x).
        const int h_cells = cell(p.y - 1, p.x) + cell(p.y, p.x);
        if (h_cells > 0) {
            const Index a = index.at(p), b = index.at({p.x + 1, p.y});
            edges.emplace_back(a, b);
            if (h_cells == 1) boundary[static_cast<std::size_t>(a)] = boundary[static_cast<std::size_t>(b)] = true;
        }
        // Vertical side p -> p + (0, 1) borders cells (p.y, p.x - 1) and (p.y, p.x).
        const int v_cells = cell(p.y, p.x - 1) + cell(p.y, p.x);
        if (v_cells > 0) {
            const Index a = index.at(p), b = index.at({p.x, p.y + 1});
            edges.emplace_back(a, b);
            if (v_cells == 1) boundary[static_cast<std::size_t>(a)] = boundary[static_cast<std::size_t>(b)] = true;
        }
    }
    return GridDomain(h, std::move(nodes), std::move(edges), std::move(boundary),
                      "mask " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace dnrel::grid
