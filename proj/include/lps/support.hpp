#pragma once
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <vector>

#include "lps/curve_trace.hpp"
#include "lps/polynomial.hpp"

namespace lps {

struct SupportOptions {
    double grad_tol = 1e-6;
    double residual_tol = 1e-12;
    int max_components = 64;
    int min_component_cells = 4;
};

// Sign-classified grid over [-R_hat, R_hat]^2 restricted to the disk.
// Cell labels: kOutside, kZeroCrossing, or a first-support component id.
struct RegionDecomposition {
    static constexpr int kOutside = -2;
    static constexpr int kZeroCrossing = -1;

    int resolution = 0;
    double cell = 0.0;
    double radius = 0.0;
    double r_hat = 0.0;
    Window win;
    std::vector<int> label;          // resolution^2, row-major
    int component_count = 0;
    std::vector<bool> exterior;      // per component
    std::vector<int> component_size; // cells per component

    int at(int i, int j) const { return label[static_cast<std::size_t>(j) * resolution + i]; }
    Vec2 center(int i, int j) const {
        return {win.x0 + (i + 0.5) * cell, win.y0 + (j + 0.5) * cell};
    }
};

// The support: exterior components merged into index 0, interior components
// re-indexed 1..m in discovery order.
struct SupportPartition {
    RegionDecomposition dec;
    std::vector<int> support_of;  // first-support component -> support index
    int index_count = 0;          // |I|

    int support_label(int i, int j) const {
        int l = dec.at(i, j);
        return l >= 0 ? support_of[l] : l;
    }
};

using Edge = std::pair<int, int>;  // normalized i < j
using EdgeSet = std::vector<Edge>;

struct GluingPoint {
    Edge edge;
    Vec2 p;
    double f_abs = 0.0;
    double grad_norm = 0.0;
};

struct GluingPlan {
    int index_count = 0;
    EdgeSet graph_edges;  // F
    EdgeSet tree_edges;   // E, BFS tree from index 0
    std::vector<GluingPoint> points;  // one per tree edge, same order
};

inline RegionDecomposition decompose(const Polynomial& f, const Rational& r2, int resolution,
                                     const SupportOptions& opt = {}) {
    RegionDecomposition dec;
    dec.resolution = resolution;
    dec.radius = std::sqrt(to_double(r2));
    dec.r_hat = std::ceil(dec.radius);
    dec.win = Window{-dec.r_hat, -dec.r_hat, 2.0 * dec.r_hat};
    dec.cell = dec.win.size / resolution;

    ScalarField field(f, {});
    const int n = resolution;
    std::vector<double> corner(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            corner[static_cast<std::size_t>(j) * (n + 1) + i] =
                field(dec.win.x0 + i * dec.cell, dec.win.y0 + j * dec.cell);

    dec.label.assign(static_cast<std::size_t>(n) * n, RegionDecomposition::kOutside);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (dec.center(i, j).norm() > dec.radius) continue;
            bool neg = false, pos = false;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di)
                    (corner[static_cast<std::size_t>(j + dj) * (n + 1) + i + di] < 0.0 ? neg : pos) = true;
            dec.label[static_cast<std::size_t>(j) * n + i] =
                (neg && pos) ? RegionDecomposition::kZeroCrossing : -3;  // -3: fillable
        }
    }

    // Flood fill, 4-connectivity, deterministic row-major seeding.
    auto idx = [n](int i, int j) { return static_cast<std::size_t>(j) * n + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (dec.label[idx(i, j)] != -3) continue;
            int comp = dec.component_count++;
            if (dec.component_count > opt.max_components)
                throw Error("decompose: more than " + std::to_string(opt.max_components) +
                            " components");
            int count = 0;
            std::deque<std::pair<int, int>> queue{{i, j}};
            dec.label[idx(i, j)] = comp;
            while (!queue.empty()) {
                auto [ci, cj] = queue.front();
                queue.pop_front();
                ++count;
                const int di[4] = {1, -1, 0, 0};
                const int dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int ni = ci + di[d], nj = cj + dj[d];
                    if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                    if (dec.label[idx(ni, nj)] != -3) continue;
                    dec.label[idx(ni, nj)] = comp;
                    queue.emplace_back(ni, nj);
                }
            }
            dec.component_size.push_back(count);
        }
    }

    for (int c = 0; c < dec.component_count; ++c) {
        if (dec.component_size[c] < opt.min_component_cells)
            throw ResolutionTooCoarseError("component " + std::to_string(c) + " has only " +
                                           std::to_string(dec.component_size[c]) + " cells");
    }

    // A component is exterior when it owns two angularly consecutive cells of
    // the disk-boundary ring (the proxy for sharing a 1-manifold with the
    // circle; single touch cells do not count).
    struct RingCell {
        double angle;
        int comp;
    };
    std::vector<RingCell> ring;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (dec.label[idx(i, j)] == RegionDecomposition::kOutside) continue;
            bool edge_of_disk = false;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ni = i + di[d], nj = j + dj[d];
                if (ni < 0 || nj < 0 || ni >= n || nj >= n ||
                    dec.label[idx(ni, nj)] == RegionDecomposition::kOutside)
                    edge_of_disk = true;
            }
            if (!edge_of_disk) continue;
            Vec2 c = dec.center(i, j);
            ring.push_back({std::atan2(c.y, c.x), dec.label[idx(i, j)]});
        }
    }
    std::sort(ring.begin(), ring.end(), [](const RingCell& a, const RingCell& b) {
        return a.angle < b.angle;
    });
    dec.exterior.assign(dec.component_count, false);
    for (std::size_t k = 0; k < ring.size(); ++k) {
        const RingCell& a = ring[k];
        const RingCell& b = ring[(k + 1) % ring.size()];
        if (a.comp >= 0 && a.comp == b.comp) dec.exterior[a.comp] = true;
    }
    return dec;
}

inline SupportPartition build_support(RegionDecomposition dec) {
    SupportPartition sup;
    bool any_exterior = false;
    for (bool e : dec.exterior) any_exterior |= e;
    if (!any_exterior)
        throw NoExteriorComponentError("no component shares a boundary arc with the circle");
    sup.support_of.assign(dec.component_count, 0);
    int next = 1;
    for (int c = 0; c < dec.component_count; ++c) {
        if (!dec.exterior[c]) sup.support_of[c] = next++;
    }
    sup.index_count = next;
    sup.dec = std::move(dec);
    return sup;
}

namespace detail {

// Newton landings drift a few nanometers along Z(f) from the nearby
// low-denominator rationals. Any boundary point with a regular gradient is a
// valid gluing choice, so nudge the pick onto an exact rational point of
// Z(f) when one sits within a small fraction of a cell; downstream algebra
// then runs over exact coefficients.
inline Vec2 snap_to_rational_zero(const Polynomial& f, Vec2 p, double snap_tol) {
    auto rx = rationalize(p.x, 1u << 16, snap_tol);
    auto ry = rationalize(p.y, 1u << 16, snap_tol);
    if (!rx || !ry) return p;
    Polynomial value = f.substitute(kVarX, *rx).substitute(kVarY, *ry);
    Rational v = value.is_zero() ? Rational(0) : value.terms().begin()->second;
    Rational tol(BigInt(1), BigInt("1000000000000"));
    if ((v < 0 ? Rational(-v) : v) < tol) return {to_double(*rx), to_double(*ry)};
    return p;
}

// Zero-crossing cells adjacent to both members of a support index pair,
// grouped per pair.
inline std::map<Edge, std::vector<std::pair<int, int>>> shared_boundary_cells(
    const SupportPartition& sup) {
    const int n = sup.dec.resolution;
    std::map<Edge, std::vector<std::pair<int, int>>> cells;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (sup.dec.at(i, j) != RegionDecomposition::kZeroCrossing) continue;
            std::vector<int> labels;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ni = i + di[d], nj = j + dj[d];
                if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                int l = sup.support_label(ni, nj);
                if (l >= 0) labels.push_back(l);
            }
            std::sort(labels.begin(), labels.end());
            labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
            for (std::size_t a = 0; a < labels.size(); ++a)
                for (std::size_t b = a + 1; b < labels.size(); ++b)
                    cells[{labels[a], labels[b]}].emplace_back(i, j);
        }
    }
    return cells;
}

// True when the cell list contains a 4-connected chain of length >= 2.
inline bool has_two_cell_chain(const std::vector<std::pair<int, int>>& cells) {
    for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t b = a + 1; b < cells.size(); ++b) {
            int manhattan = std::abs(cells[a].first - cells[b].first) +
                            std::abs(cells[a].second - cells[b].second);
            if (manhattan == 1) return true;
        }
    }
    return false;
}

}  // namespace detail

// {i, j} is an edge when the two support components are separated by a chain
// of at least two consecutive zero-crossing cells; this excludes
// single-point contact.
inline EdgeSet adjacency_graph(const SupportPartition& sup) {
    EdgeSet edges;
    for (const auto& [edge, cells] : detail::shared_boundary_cells(sup)) {
        if (detail::has_two_cell_chain(cells)) edges.push_back(edge);
    }
    return edges;
}

// BFS tree rooted at 0, visiting neighbors in ascending index order.
inline EdgeSet spanning_tree(int index_count, const EdgeSet& graph) {
    std::vector<std::vector<int>> adj(index_count);
    for (const auto& [a, b] : graph) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());

    EdgeSet tree;
    std::vector<bool> seen(index_count, false);
    std::deque<int> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : adj[v]) {
            if (seen[w]) continue;
            seen[w] = true;
            tree.push_back({std::min(v, w), std::max(v, w)});
            queue.push_back(w);
        }
    }
    for (int v = 0; v < index_count; ++v) {
        if (!seen[v])
            throw DisconnectedAdjacencyError(
                "support component " + std::to_string(v) +
                " is unreachable from the exterior; the region graph should be connected");
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

// Chooses p_e on the shared boundary of each tree edge: Newton-refined onto
// Z(f), maximizing |grad f| (ties broken lexicographically).
inline GluingPlan pick_gluing_points(const SupportPartition& sup, const EdgeSet& graph,
                                     const EdgeSet& tree, const Polynomial& f,
                                     const SupportOptions& opt = {}) {
    GluingPlan plan;
    plan.index_count = sup.index_count;
    plan.graph_edges = graph;
    plan.tree_edges = tree;

    ScalarField field(f, {});
    auto cells = detail::shared_boundary_cells(sup);
    const double h = sup.dec.cell;
    const double max_move = h * std::sqrt(2.0);  // stay within one cell diagonal

    for (const Edge& e : tree) {
        auto it = cells.find(e);
        if (it == cells.end())
            throw NoRegularBoundaryPointError("no shared boundary cells for edge (" +
                                              std::to_string(e.first) + "," +
                                              std::to_string(e.second) + ")");
        bool have = false;
        GluingPoint best;
        for (const auto& [ci, cj] : it->second) {
            Vec2 p = sup.dec.center(ci, cj);
            bool converged = false;
            for (int k = 0; k < 25; ++k) {
                long double v = field.value_ld(p);
                if (std::abs(static_cast<double>(v)) < opt.residual_tol) {
                    converged = true;
                    break;
                }
                Vec2 g = field.gradient(p);
                double g2 = g.norm2();
                if (g2 == 0.0) break;
                p = p - g * (static_cast<double>(v) / g2);
                if (dist(p, sup.dec.center(ci, cj)) > max_move) break;
            }
            if (!converged || dist(p, sup.dec.center(ci, cj)) > max_move) continue;
            double gn = field.gradient(p).norm();
            if (gn <= opt.grad_tol) continue;
            // Skip near-duplicates of already chosen points.
            bool dup = false;
            for (const auto& chosen : plan.points)
                if (dist(chosen.p, p) < 1e-9) dup = true;
            if (dup) continue;
            bool better = !have || gn > best.grad_norm ||
                          (gn == best.grad_norm &&
                           (p.x < best.p.x || (p.x == best.p.x && p.y < best.p.y)));
            if (better) {
                best = GluingPoint{e, p, std::abs(static_cast<double>(field.value_ld(p))), gn};
                have = true;
            }
        }
        if (!have)
            throw NoRegularBoundaryPointError(
                "every shared-boundary candidate for edge (" + std::to_string(e.first) + "," +
                std::to_string(e.second) + ") has |grad f| below tolerance");
        Vec2 snapped = detail::snap_to_rational_zero(f, best.p, std::max(1e-9, 1e-3 * h));
        if (snapped.x != best.p.x || snapped.y != best.p.y) {
            best.p = snapped;
            best.f_abs = std::abs(static_cast<double>(field.value_ld(best.p)));
            best.grad_norm = field.gradient(best.p).norm();
        }
        plan.points.push_back(best);
    }
    return plan;
}

}  // namespace lps
