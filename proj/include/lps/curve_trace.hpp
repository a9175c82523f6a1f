#pragma once
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lps/compiled.hpp"
#include "lps/geometry.hpp"

namespace lps {

struct Window {
    double x0 = 0.0;
    double y0 = 0.0;
    double size = 1.0;  // square side length
};

struct TraceOptions {
    int resolution = 256;       // base cells per axis
    double residual_tol = 1e-10;
    int newton_max_iters = 25;
    int subdivision = 2;        // binary subdivisions of flagged cells (2 -> 4x4 subcells)
    int dilation = 2;           // flag neighborhood in base cells
    double merge_cell_diagonals = 1.5;  // endpoint merge radius, in base-cell diagonals
    std::optional<double> clip_radius;  // keep vertices with |v| <= clip_radius + 2*cell
    // Closed loops smaller than this many base cells are quantization noise
    // from sub-cell slivers (e.g. near parabolic tangencies) and are dropped.
    double min_closed_loop_cells = 2.0;
};

struct TracedCurve {
    std::vector<std::vector<Vec2>> polylines;
    std::vector<std::vector<double>> residuals;  // |field| per vertex, measured in long double
    std::vector<bool> closed;
    std::vector<int> component_of;  // per polyline, contiguous from 0
    int component_count = 0;
    double min_grad_norm = std::numeric_limits<double>::infinity();
    double cell = 0.0;       // base cell size
    double bounding_radius = 0.0;
    std::size_t vertex_count = 0;
    std::size_t rejected_vertices = 0;

    std::vector<Vec2> point_set() const {
        std::vector<Vec2> pts;
        pts.reserve(vertex_count);
        for (const auto& pl : polylines) pts.insert(pts.end(), pl.begin(), pl.end());
        return pts;
    }

    bool empty() const { return polylines.empty(); }
};

namespace detail {

// Union-find with deterministic roots.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }
    std::size_t find(std::size_t a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent_[b] = a;  // keep the smaller index as root
        else parent_[a] = b;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

// Marching squares over a square window with local subdivision near sign
// changes, Newton refinement of every emitted vertex onto the zero set, and
// chaining of the per-cell segments into polylines.
class CurveTracer {
public:
    CurveTracer(const ScalarField& field, const Window& win, const TraceOptions& opt)
        : f_(field), win_(win), opt_(opt) {}

    TracedCurve run() {
        const int n = opt_.resolution;
        const double h = win_.size / n;
        sub_ = 1 << opt_.subdivision;
        lattice_n_ = static_cast<std::int64_t>(n) * sub_;
        hs_ = win_.size / static_cast<double>(lattice_n_);

        // Base corner grid.
        std::vector<double> corner(static_cast<std::size_t>(n + 1) * (n + 1));
        for (int j = 0; j <= n; ++j) {
            double y = win_.y0 + j * h;
            for (int i = 0; i <= n; ++i) {
                corner[static_cast<std::size_t>(j) * (n + 1) + i] = f_(win_.x0 + i * h, y);
            }
        }

        auto corner_at = [&](int i, int j) { return corner[static_cast<std::size_t>(j) * (n + 1) + i]; };
        auto in_scope = [&](int i, int j) {
            if (!opt_.clip_radius) return true;
            double keep = *opt_.clip_radius + 2.0 * h;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    double x = win_.x0 + (i + di) * h, y = win_.y0 + (j + dj) * h;
                    if (x * x + y * y <= keep * keep) return true;
                }
            return false;
        };

        // Flag cells with a corner sign change, then dilate.
        std::vector<std::uint8_t> flagged(static_cast<std::size_t>(n) * n, 0);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (!in_scope(i, j)) continue;
                bool neg = false, pos = false;
                for (int dj = 0; dj <= 1; ++dj)
                    for (int di = 0; di <= 1; ++di)
                        (corner_at(i + di, j + dj) < 0.0 ? neg : pos) = true;
                if (neg && pos) flagged[static_cast<std::size_t>(j) * n + i] = 1;
            }
        }
        std::vector<std::uint8_t> emit(static_cast<std::size_t>(n) * n, 0);
        const int r = opt_.dilation;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (!flagged[static_cast<std::size_t>(j) * n + i]) continue;
                for (int dj = -r; dj <= r; ++dj) {
                    for (int di = -r; di <= r; ++di) {
                        int ii = i + di, jj = j + dj;
                        if (ii >= 0 && jj >= 0 && ii < n && jj < n && in_scope(ii, jj))
                            emit[static_cast<std::size_t>(jj) * n + ii] = 1;
                    }
                }
            }
        }

        // Subdivide and emit segments per subcell, in row-major cell order.
        std::vector<double> sc(static_cast<std::size_t>(sub_ + 1) * (sub_ + 1));
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (!emit[static_cast<std::size_t>(j) * n + i]) continue;
                for (int sj = 0; sj <= sub_; ++sj) {
                    for (int si = 0; si <= sub_; ++si) {
                        std::int64_t gi = static_cast<std::int64_t>(i) * sub_ + si;
                        std::int64_t gj = static_cast<std::int64_t>(j) * sub_ + sj;
                        sc[static_cast<std::size_t>(sj) * (sub_ + 1) + si] =
                            f_(win_.x0 + gi * hs_, win_.y0 + gj * hs_);
                    }
                }
                for (int sj = 0; sj < sub_; ++sj)
                    for (int si = 0; si < sub_; ++si)
                        emit_subcell(i, j, si, sj, sc);
            }
        }

        return assemble(h);
    }

private:
    const ScalarField& f_;
    Window win_;
    TraceOptions opt_;
    int sub_ = 4;
    std::int64_t lattice_n_ = 0;
    double hs_ = 0.0;

    struct Vertex {
        Vec2 pos;
        double residual = 0.0;
        double grad_norm = 0.0;
        bool valid = false;
    };

    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex_;
    std::vector<Vertex> vertices_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> segments_;
    std::size_t rejected_ = 0;

    std::uint64_t edge_key(std::int64_t gi, std::int64_t gj, bool horizontal) const {
        return (static_cast<std::uint64_t>(gj) * (lattice_n_ + 1) + static_cast<std::uint64_t>(gi)) * 2 +
               (horizontal ? 0 : 1);
    }

    Vec2 lattice_point(std::int64_t gi, std::int64_t gj) const {
        return {win_.x0 + gi * hs_, win_.y0 + gj * hs_};
    }

    // Creates (or reuses) the refined vertex on a lattice edge.
    std::uint32_t edge_vertex(std::int64_t gi, std::int64_t gj, bool horizontal, double va, double vb) {
        std::uint64_t key = edge_key(gi, gj, horizontal);
        auto it = edge_vertex_.find(key);
        if (it != edge_vertex_.end()) return it->second;

        double t = (va == vb) ? 0.5 : va / (va - vb);
        t = std::clamp(t, 0.0, 1.0);
        Vec2 a = lattice_point(gi, gj);
        Vec2 b = horizontal ? lattice_point(gi + 1, gj) : lattice_point(gi, gj + 1);
        Vec2 p = a + (b - a) * t;

        Vertex v;
        v.pos = refine(p, v.residual, v.valid);
        v.grad_norm = f_.gradient(v.pos).norm();
        if (!v.valid) ++rejected_;

        auto idx = static_cast<std::uint32_t>(vertices_.size());
        vertices_.push_back(v);
        edge_vertex_.emplace(key, idx);
        return idx;
    }

    // Newton flow toward the zero set: p <- p - f * grad f / |grad f|^2.
    // The residual is measured in long double; double rounding noise near
    // heavy cancellation can exceed the acceptance tolerance.
    Vec2 refine(Vec2 p, double& residual, bool& ok) const {
        const double max_move = 1.5 * (win_.size / opt_.resolution);
        Vec2 start = p;
        long double val = f_.value_ld(p);
        for (int it = 0; it < opt_.newton_max_iters; ++it) {
            if (std::abs(static_cast<double>(val)) < opt_.residual_tol) break;
            Vec2 g = f_.gradient(p);
            double g2 = g.norm2();
            if (g2 == 0.0) break;
            Vec2 q = p - g * (static_cast<double>(val) / g2);
            if (dist(q, start) > max_move) break;
            p = q;
            val = f_.value_ld(p);
        }
        residual = std::abs(static_cast<double>(val));
        ok = residual < opt_.residual_tol;
        if (ok && opt_.clip_radius) ok = p.norm() <= *opt_.clip_radius + 2.0 * (win_.size / opt_.resolution);
        return p;
    }

    void emit_segment(std::uint32_t a, std::uint32_t b) {
        if (a == b) return;
        if (!vertices_[a].valid || !vertices_[b].valid) return;
        segments_.emplace_back(a, b);
    }

    void emit_subcell(int ci, int cj, int si, int sj, const std::vector<double>& sc) {
        auto val = [&](int di, int dj) { return sc[static_cast<std::size_t>(sj + dj) * (sub_ + 1) + (si + di)]; };
        double v00 = val(0, 0), v10 = val(1, 0), v11 = val(1, 1), v01 = val(0, 1);
        int cfg = (v00 >= 0.0 ? 1 : 0) | (v10 >= 0.0 ? 2 : 0) | (v11 >= 0.0 ? 4 : 0) | (v01 >= 0.0 ? 8 : 0);
        if (cfg == 0 || cfg == 15) return;

        std::int64_t gi = static_cast<std::int64_t>(ci) * sub_ + si;
        std::int64_t gj = static_cast<std::int64_t>(cj) * sub_ + sj;
        auto bottom = [&] { return edge_vertex(gi, gj, true, v00, v10); };
        auto top = [&] { return edge_vertex(gi, gj + 1, true, v01, v11); };
        auto left = [&] { return edge_vertex(gi, gj, false, v00, v01); };
        auto right = [&] { return edge_vertex(gi + 1, gj, false, v10, v11); };

        switch (cfg) {
            case 1: case 14: emit_segment(left(), bottom()); break;
            case 2: case 13: emit_segment(bottom(), right()); break;
            case 4: case 11: emit_segment(right(), top()); break;
            case 8: case 7: emit_segment(top(), left()); break;
            case 3: case 12: emit_segment(left(), right()); break;
            case 6: case 9: emit_segment(bottom(), top()); break;
            case 5: case 10: {
                // Saddle: the center sample decides which diagonal connects.
                double vc = f_(win_.x0 + (gi + 0.5) * hs_, win_.y0 + (gj + 0.5) * hs_);
                if ((vc >= 0.0) == (cfg == 5)) {
                    emit_segment(bottom(), right());
                    emit_segment(top(), left());
                } else {
                    emit_segment(left(), bottom());
                    emit_segment(right(), top());
                }
                break;
            }
            default: break;
        }
    }

    TracedCurve assemble(double h) {
        TracedCurve out;
        out.cell = h;
        out.rejected_vertices = rejected_;

        // Adjacency; junction vertices (shared lattice corners) may have
        // degree > 2 and simply terminate chains.
        std::vector<std::vector<std::uint32_t>> adj(vertices_.size());
        for (std::uint32_t s = 0; s < segments_.size(); ++s) {
            adj[segments_[s].first].push_back(s);
            adj[segments_[s].second].push_back(s);
        }
        std::vector<bool> used(segments_.size(), false);

        auto walk = [&](std::uint32_t start_vertex, std::uint32_t start_seg) {
            std::vector<std::uint32_t> chain{start_vertex};
            std::uint32_t v = start_vertex, s = start_seg;
            while (true) {
                used[s] = true;
                std::uint32_t w = (segments_[s].first == v) ? segments_[s].second : segments_[s].first;
                chain.push_back(w);
                if (adj[w].size() != 2) break;
                std::uint32_t next = (adj[w][0] == s) ? adj[w][1] : adj[w][0];
                if (used[next]) break;
                v = w;
                s = next;
            }
            return chain;
        };

        std::vector<std::vector<std::uint32_t>> chains;
        // Open chains first, seeded at non-degree-2 vertices.
        for (std::uint32_t v = 0; v < vertices_.size(); ++v) {
            if (adj[v].size() == 2) continue;
            for (std::uint32_t s : adj[v])
                if (!used[s]) chains.push_back(walk(v, s));
        }
        // Remaining segments are cycles.
        for (std::uint32_t s = 0; s < segments_.size(); ++s) {
            if (!used[s]) chains.push_back(walk(segments_[s].first, s));
        }

        for (const auto& chain : chains) {
            if (chain.size() < 2) continue;
            bool is_closed = chain.front() == chain.back();
            if (is_closed) {
                double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
                for (auto vi : chain) {
                    const Vec2& p = vertices_[vi].pos;
                    x0 = std::min(x0, p.x);
                    x1 = std::max(x1, p.x);
                    y0 = std::min(y0, p.y);
                    y1 = std::max(y1, p.y);
                }
                double diag = std::hypot(x1 - x0, y1 - y0);
                if (diag < opt_.min_closed_loop_cells * h * std::sqrt(2.0)) continue;
            }
            std::vector<Vec2> pts;
            std::vector<double> res;
            pts.reserve(chain.size());
            for (auto vi : chain) {
                const Vertex& v = vertices_[vi];
                pts.push_back(v.pos);
                res.push_back(v.residual);
                out.min_grad_norm = std::min(out.min_grad_norm, v.grad_norm);
                out.bounding_radius = std::max(out.bounding_radius, v.pos.norm());
            }
            out.closed.push_back(is_closed);
            out.vertex_count += pts.size();
            out.polylines.push_back(std::move(pts));
            out.residuals.push_back(std::move(res));
        }

        label_components(out);
        return out;
    }

    // Merge polylines whose endpoints fall within the merge radius; closed
    // polylines participate through their (coincident) endpoints.
    void label_components(TracedCurve& out) const {
        std::size_t np = out.polylines.size();
        detail::UnionFind uf(np);
        double tol = opt_.merge_cell_diagonals * out.cell * std::sqrt(2.0);

        struct Endpoint {
            Vec2 p;
            std::size_t polyline;
        };
        std::vector<Endpoint> eps;
        eps.reserve(2 * np);
        for (std::size_t i = 0; i < np; ++i) {
            eps.push_back({out.polylines[i].front(), i});
            eps.push_back({out.polylines[i].back(), i});
        }
        // Bucketed all-pairs within tolerance.
        double inv = (tol > 0.0) ? 1.0 / tol : 1.0;
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        auto bucket_of = [&](const Vec2& p) {
            auto bx = static_cast<std::int64_t>(std::floor(p.x * inv));
            auto by = static_cast<std::int64_t>(std::floor(p.y * inv));
            return (static_cast<std::uint64_t>(bx) << 32) ^ (static_cast<std::uint64_t>(by) & 0xffffffffull);
        };
        for (std::size_t k = 0; k < eps.size(); ++k) buckets[bucket_of(eps[k].p)].push_back(k);
        for (std::size_t k = 0; k < eps.size(); ++k) {
            auto bx = static_cast<std::int64_t>(std::floor(eps[k].p.x * inv));
            auto by = static_cast<std::int64_t>(std::floor(eps[k].p.y * inv));
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                for (std::int64_t di = -1; di <= 1; ++di) {
                    std::uint64_t key = (static_cast<std::uint64_t>(bx + di) << 32) ^
                                        (static_cast<std::uint64_t>(by + dj) & 0xffffffffull);
                    auto it = buckets.find(key);
                    if (it == buckets.end()) continue;
                    for (std::size_t m : it->second) {
                        if (m <= k) continue;
                        if (dist(eps[k].p, eps[m].p) <= tol) uf.unite(eps[k].polyline, eps[m].polyline);
                    }
                }
            }
        }

        out.component_of.assign(np, -1);
        std::map<std::size_t, int> root_label;
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r = uf.find(i);
            auto it = root_label.find(r);
            if (it == root_label.end()) it = root_label.emplace(r, static_cast<int>(root_label.size())).first;
            out.component_of[i] = it->second;
        }
        out.component_count = static_cast<int>(root_label.size());
        if (out.min_grad_norm == std::numeric_limits<double>::infinity()) out.min_grad_norm = 0.0;
    }
};

inline TracedCurve trace_implicit(const ScalarField& field, const Window& win, const TraceOptions& opt) {
    return CurveTracer(field, win, opt).run();
}

// Component count under any-vertex proximity merging. Unlike the trace's
// endpoint-based labels this connects polylines that cross mid-chain, which
// is the right notion for Gamma (arcs genuinely meet at singular points).
inline int proximity_components(const TracedCurve& curve, double radius) {
    std::size_t np = curve.polylines.size();
    if (np == 0) return 0;
    detail::UnionFind uf(np);
    double inv = 1.0 / std::max(radius, 1e-300);
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> buckets;
    auto key_of = [&](double x, double y) {
        auto bx = static_cast<std::int64_t>(std::floor(x * inv));
        auto by = static_cast<std::int64_t>(std::floor(y * inv));
        return (static_cast<std::uint64_t>(bx) << 32) ^ (static_cast<std::uint64_t>(by) & 0xffffffffull);
    };
    for (std::uint32_t pl = 0; pl < np; ++pl)
        for (std::uint32_t k = 0; k < curve.polylines[pl].size(); ++k)
            buckets[key_of(curve.polylines[pl][k].x, curve.polylines[pl][k].y)].push_back({pl, k});
    for (std::uint32_t pl = 0; pl < np; ++pl) {
        for (const auto& v : curve.polylines[pl]) {
            auto bx = static_cast<std::int64_t>(std::floor(v.x * inv));
            auto by = static_cast<std::int64_t>(std::floor(v.y * inv));
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                for (std::int64_t di = -1; di <= 1; ++di) {
                    std::uint64_t key = (static_cast<std::uint64_t>(bx + di) << 32) ^
                                        (static_cast<std::uint64_t>(by + dj) & 0xffffffffull);
                    auto it = buckets.find(key);
                    if (it == buckets.end()) continue;
                    for (const auto& [opl, ok] : it->second) {
                        if (opl == pl) continue;
                        if (dist(v, curve.polylines[opl][ok]) <= radius) uf.unite(pl, opl);
                    }
                }
            }
        }
    }
    std::vector<bool> seen(np, false);
    int count = 0;
    for (std::size_t i = 0; i < np; ++i) {
        std::size_t r = uf.find(i);
        if (!seen[r]) {
            seen[r] = true;
            ++count;
        }
    }
    return count;
}

}  // namespace lps
