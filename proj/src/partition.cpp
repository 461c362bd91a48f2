#include "ptzcov/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ptzcov::partition {

using geom2d::area;
using geom2d::region_difference;
using geom2d::region_intersect;
using geom2d::region_union;

namespace {

// Union-find over agent indices for grouping equal-quality overlaps.
struct Groups {
    std::vector<int> parent;
    explicit Groups(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

struct Box {
    double x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    bool overlaps(const Box& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
};

// Axis-aligned bounds of an ellipse; they also bound any inscribed polygon.
Box bounds(const geom2d::Ellipse& e) {
    const double c = std::cos(e.orientation), s = std::sin(e.orientation);
    const double hx = std::hypot(e.semi_major * c, e.semi_minor * s);
    const double hy = std::hypot(e.semi_major * s, e.semi_minor * c);
    return {e.center.x - hx, e.center.y - hy, e.center.x + hx, e.center.y + hy};
}

bool has_area(const Region& r) { return !r.empty() && area(r) > geom2d::kDefaultEps * geom2d::kDefaultEps; }

}  // namespace

Partition compute_partition(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                            const ConvexPolygon& omega, const PartitionOptions& opts) {
    if (states.size() != lims.size()) throw Error("compute_partition: states and limits differ in length");
    if (!(opts.eps_f > 0.0)) throw Error("compute_partition: eps_f must be positive");

    const int n = static_cast<int>(states.size());
    const Region omega_region = Region::from_polygon(omega);
    const double eps = opts.eps_f;

    Partition p;
    p.cells.resize(n);
    p.neighbors.resize(n);
    p.qualities.resize(n);
    p.guaranteed.resize(n);

    std::vector<Region> raw(n);  // polygonized C_i^gs, unclipped
    std::vector<Box> box(n);
    for (int i = 0; i < n; ++i) {
        p.qualities[i] = sensing::quality(states[i], lims[i]).f;
        if (const auto e = sensing::guaranteed_region(states[i])) {
            raw[i] = geom2d::ellipse_to_polygon(*e, opts.polygonization);
            box[i] = bounds(*e);
            p.guaranteed[i] = region_intersect(raw[i], omega_region);
        }
    }
    const auto& f = p.qualities;

    // Pairwise overlaps feed both the neighbor graph and the equal-quality groups.
    Groups groups(n);
    std::vector<std::vector<bool>> equal_edge(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (raw[i].empty() || raw[j].empty() || !box[i].overlaps(box[j])) continue;
            if (!has_area(region_intersect(raw[i], raw[j]))) continue;
            p.neighbors[i].push_back(j);
            p.neighbors[j].push_back(i);
            if (std::abs(f[i] - f[j]) <= eps && has_area(region_intersect(p.guaranteed[i], p.guaranteed[j]))) {
                equal_edge[i][j] = equal_edge[j][i] = true;
                groups.join(i, j);
            }
        }
    }
    for (auto& nb : p.neighbors) std::sort(nb.begin(), nb.end());

    // W_i: own clipped region minus every neighbor of equal or higher quality.
    for (int i = 0; i < n; ++i) {
        Region cell = p.guaranteed[i];
        for (int j : p.neighbors[i]) {
            if (cell.empty()) break;
            if (f[j] >= f[i] - eps) cell = region_difference(cell, p.guaranteed[j]);
        }
        p.cells[i] = std::move(cell);
    }

    // W_c^l: union over equal-quality edges (i, j) of C_i ∩ C_j, minus agents strictly
    // better than the pair.
    std::vector<int> roots;
    for (int i = 0; i < n; ++i) {
        if (groups.find(i) == i) roots.push_back(i);
    }
    for (int root : roots) {
        CommonRegion common;
        for (int i = 0; i < n; ++i) {
            if (groups.find(i) == root) common.agents.push_back(i);
        }
        if (common.agents.size() < 2) continue;
        common.quality = -1.0;
        for (int i : common.agents) common.quality = std::max(common.quality, f[i]);

        for (std::size_t a = 0; a < common.agents.size(); ++a) {
            for (std::size_t b = a + 1; b < common.agents.size(); ++b) {
                const int i = common.agents[a], j = common.agents[b];
                if (!equal_edge[i][j]) continue;
                Region overlap = region_intersect(p.guaranteed[i], p.guaranteed[j]);
                const double floor = std::min(f[i], f[j]) + eps;
                for (int k = 0; k < n && !overlap.empty(); ++k) {
                    if (k != i && k != j && f[k] > floor) overlap = region_difference(overlap, p.guaranteed[k]);
                }
                common.region = region_union(common.region, overlap);
            }
        }
        if (!common.region.empty()) p.common.push_back(std::move(common));
    }

    p.neutral = region_difference(omega_region, geom2d::region_union_all(p.guaranteed));
    return p;
}

double tiling_defect(const Partition& p, const ConvexPolygon& omega) {
    double total = area(p.neutral);
    for (const auto& c : p.cells) total += area(c);
    for (const auto& c : p.common) total += area(c.region);
    return total - omega.area();
}

}  // namespace ptzcov::partition
