#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "lps/errors.hpp"
#include "lps/geometry.hpp"

namespace lps {

// max(sup_a inf_b, sup_b inf_a) over finite point sets.
inline double hausdorff_brute(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) throw EmptyInputError("hausdorff: empty point set");
    auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, (p - q).norm2());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

namespace detail {

// Uniform-grid nearest-neighbor structure with conservative rectangle
// pruning, so the reported minima match the brute-force scan exactly.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec2>& pts) : pts_(pts) {
        xmin_ = ymin_ = std::numeric_limits<double>::infinity();
        double xmax = -xmin_, ymax = -ymin_;
        for (const auto& p : pts) {
            xmin_ = std::min(xmin_, p.x);
            ymin_ = std::min(ymin_, p.y);
            xmax = std::max(xmax, p.x);
            ymax = std::max(ymax, p.y);
        }
        double extent = std::max(xmax - xmin_, ymax - ymin_);
        nside_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pts.size()))));
        cell_ = std::max(extent / nside_, 1e-300);
        buckets_.assign(static_cast<std::size_t>(nside_) * nside_, {});
        for (std::size_t i = 0; i < pts.size(); ++i) {
            buckets_[bucket_index(pts[i])].push_back(static_cast<int>(i));
        }
    }

    double nearest_dist2(const Vec2& p) const {
        int pi = clamp_idx((p.x - xmin_) / cell_);
        int pj = clamp_idx((p.y - ymin_) / cell_);
        double best = std::numeric_limits<double>::infinity();
        for (int ring = 0; ring <= 2 * nside_; ++ring) {
            // Rect distances grow with the ring index, so once a whole ring
            // is beyond the current best nothing farther can win.
            if (best < std::numeric_limits<double>::infinity() &&
                min_ring_dist2(p, pi, pj, ring) > best)
                break;
            for (int j = pj - ring; j <= pj + ring; ++j) {
                for (int i = pi - ring; i <= pi + ring; ++i) {
                    bool on_ring = (std::abs(i - pi) == ring || std::abs(j - pj) == ring);
                    if (!on_ring || i < 0 || j < 0 || i >= nside_ || j >= nside_) continue;
                    if (rect_dist2(p, i, j) > best) continue;
                    for (int k : buckets_[static_cast<std::size_t>(j) * nside_ + i]) {
                        best = std::min(best, (pts_[k] - p).norm2());
                    }
                }
            }
        }
        return best;
    }

private:
    const std::vector<Vec2>& pts_;
    std::vector<std::vector<int>> buckets_;
    double xmin_ = 0, ymin_ = 0, cell_ = 1;
    int nside_ = 1;

    int clamp_idx(double v) const {
        return std::clamp(static_cast<int>(std::floor(v)), 0, nside_ - 1);
    }
    std::size_t bucket_index(const Vec2& p) const {
        return static_cast<std::size_t>(clamp_idx((p.y - ymin_) / cell_)) * nside_ +
               clamp_idx((p.x - xmin_) / cell_);
    }
    double rect_dist2(const Vec2& p, int i, int j) const {
        double x0 = xmin_ + i * cell_, x1 = x0 + cell_;
        double y0 = ymin_ + j * cell_, y1 = y0 + cell_;
        double dx = std::max({x0 - p.x, p.x - x1, 0.0});
        double dy = std::max({y0 - p.y, p.y - y1, 0.0});
        return dx * dx + dy * dy;
    }
    double min_ring_dist2(const Vec2& p, int pi, int pj, int ring) const {
        double best = std::numeric_limits<double>::infinity();
        for (int j = pj - ring; j <= pj + ring; ++j) {
            for (int i = pi - ring; i <= pi + ring; ++i) {
                bool on_ring = (std::abs(i - pi) == ring || std::abs(j - pj) == ring);
                if (!on_ring || i < 0 || j < 0 || i >= nside_ || j >= nside_) continue;
                best = std::min(best, rect_dist2(p, i, j));
            }
        }
        return best;
    }
};

inline double directed_hausdorff2(const std::vector<Vec2>& from, const PointGrid& to) {
    double worst = 0.0;
    for (const auto& p : from) worst = std::max(worst, to.nearest_dist2(p));
    return worst;
}

}  // namespace detail

// Grid-accelerated Hausdorff distance; agrees with hausdorff_brute.
inline double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) throw EmptyInputError("hausdorff: empty point set");
    detail::PointGrid ga(a), gb(b);
    return std::sqrt(std::max(detail::directed_hausdorff2(a, gb), detail::directed_hausdorff2(b, ga)));
}

}  // namespace lps
