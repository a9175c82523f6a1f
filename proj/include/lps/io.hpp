#pragma once
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lps/curve_trace.hpp"
#include "lps/errors.hpp"
#include "lps/support.hpp"
#include "lps/variety.hpp"

namespace lps {

inline std::string fmt_double(double v, const char* spec = "%.17g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

// --- CSV ---------------------------------------------------------------

// One vertex per row: x, y, residual, polyline id, component id.
inline std::string curve_csv(const TracedCurve& curve) {
    std::string out = "x,y,residual,arc_id,component\n";
    for (std::size_t pl = 0; pl < curve.polylines.size(); ++pl) {
        for (std::size_t k = 0; k < curve.polylines[pl].size(); ++k) {
            const Vec2& v = curve.polylines[pl][k];
            out += fmt_double(v.x) + "," + fmt_double(v.y) + "," +
                   fmt_double(curve.residuals[pl][k]) + "," + std::to_string(pl) + "," +
                   std::to_string(curve.component_of[pl]) + "\n";
        }
    }
    return out;
}

// --- SVG ---------------------------------------------------------------

// Figures use a fixed viewBox mapping of [-2*R_hat, 2*R_hat]^2 onto an
// 800x800 canvas, y pointing up.
class SvgCanvas {
public:
    SvgCanvas(double r_hat, int pixels = 800) : half_(2.0 * r_hat), px_(pixels) {
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + std::to_string(px_) +
                 " " + std::to_string(px_) + "\">\n";
        body_ += "<rect width=\"" + std::to_string(px_) + "\" height=\"" + std::to_string(px_) +
                 "\" fill=\"white\"/>\n";
    }

    void circle(const Vec2& c, double radius, const std::string& stroke, double stroke_width,
                const std::string& fill = "none") {
        body_ += "<circle cx=\"" + coord(c.x) + "\" cy=\"" + coord_y(c.y) + "\" r=\"" +
                 len(radius) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt_double(stroke_width, "%.2f") + "\" fill=\"" + fill + "\"/>\n";
    }

    void dot(const Vec2& c, double px_radius, const std::string& fill) {
        body_ += "<circle cx=\"" + coord(c.x) + "\" cy=\"" + coord_y(c.y) + "\" r=\"" +
                 fmt_double(px_radius, "%.2f") + "\" fill=\"" + fill + "\"/>\n";
    }

    void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double stroke_width) {
        if (pts.size() < 2) return;
        body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt_double(stroke_width, "%.2f") + "\" points=\"";
        for (const auto& p : pts) body_ += coord(p.x) + "," + coord_y(p.y) + " ";
        body_ += "\"/>\n";
    }

    void line(const Vec2& a, const Vec2& b, const std::string& stroke, double stroke_width) {
        body_ += "<line x1=\"" + coord(a.x) + "\" y1=\"" + coord_y(a.y) + "\" x2=\"" + coord(b.x) +
                 "\" y2=\"" + coord_y(b.y) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt_double(stroke_width, "%.2f") + "\"/>\n";
    }

    void rect_cell(const Vec2& lo, double size, const std::string& fill, double opacity) {
        body_ += "<rect x=\"" + coord(lo.x) + "\" y=\"" + coord_y(lo.y + size) + "\" width=\"" +
                 len(size) + "\" height=\"" + len(size) + "\" fill=\"" + fill + "\" opacity=\"" +
                 fmt_double(opacity, "%.2f") + "\"/>\n";
    }

    std::string finish() { return body_ + "</svg>\n"; }

private:
    double half_;
    int px_;
    std::string body_;

    std::string coord(double x) const { return fmt_double((x + half_) / (2 * half_) * px_, "%.3f"); }
    std::string coord_y(double y) const {
        return fmt_double((half_ - y) / (2 * half_) * px_, "%.3f");
    }
    std::string len(double d) const { return fmt_double(d / (2 * half_) * px_, "%.3f"); }
};

inline const std::vector<std::string>& component_palette() {
    static const std::vector<std::string> palette{
        "#c62828", "#1565c0", "#2e7d32", "#ef6c00", "#6a1b9a",
        "#00838f", "#ad1457", "#558b2f", "#4527a0", "#d84315"};
    return palette;
}

// Gamma arcs with disk outline, singular and boundary points marked.
inline std::string gamma_svg(const GammaTrace& gamma) {
    SvgCanvas svg(gamma.r_hat);
    svg.circle({0, 0}, gamma.radius, "#888888", 1.0);
    for (const auto& pl : gamma.curve.polylines) svg.polyline(pl, "#222222", 1.5);
    for (const auto& p : gamma.singular_points) svg.dot(p, 4.0, "#c62828");
    for (const auto& p : gamma.boundary_points) svg.dot(p, 4.0, "#1565c0");
    return svg.finish();
}

// Level set with one stroke color per component, Gamma overlaid thin.
inline std::string levelset_svg(const TracedCurve& curve, const GammaTrace& gamma,
                                const std::vector<Vec2>& gluing_points) {
    SvgCanvas svg(gamma.r_hat);
    svg.circle({0, 0}, gamma.radius, "#dddddd", 1.0);
    for (const auto& pl : gamma.curve.polylines) svg.polyline(pl, "#bbbbbb", 0.8);
    const auto& palette = component_palette();
    for (std::size_t pl = 0; pl < curve.polylines.size(); ++pl) {
        const std::string& color = palette[curve.component_of[pl] % palette.size()];
        svg.polyline(curve.polylines[pl], color, 1.6);
    }
    for (const auto& p : gluing_points) svg.dot(p, 4.0, "#000000");
    return svg.finish();
}

// Support overlay: cells tinted by component, tree edges between component
// centroids, gluing points marked.
inline std::string support_svg(const SupportPartition& sup, const GluingPlan& plan) {
    const RegionDecomposition& dec = sup.dec;
    SvgCanvas svg(dec.r_hat);
    svg.circle({0, 0}, dec.radius, "#888888", 1.0);
    const auto& palette = component_palette();

    std::vector<Vec2> centroid(static_cast<std::size_t>(sup.index_count), Vec2{0, 0});
    std::vector<int> count(static_cast<std::size_t>(sup.index_count), 0);
    int stride = std::max(1, dec.resolution / 128);  // cap the rect count
    for (int j = 0; j < dec.resolution; ++j) {
        for (int i = 0; i < dec.resolution; ++i) {
            int l = sup.support_label(i, j);
            if (l < 0) continue;
            Vec2 c = dec.center(i, j);
            centroid[l] = centroid[l] + c;
            ++count[l];
            if (i % stride == 0 && j % stride == 0) {
                svg.rect_cell({dec.win.x0 + i * dec.cell, dec.win.y0 + j * dec.cell},
                              dec.cell * stride, palette[l % palette.size()], 0.25);
            }
        }
    }
    for (int l = 0; l < sup.index_count; ++l)
        if (count[l] > 0) centroid[l] = centroid[l] * (1.0 / count[l]);
    for (const auto& [a, b] : plan.tree_edges) svg.line(centroid[a], centroid[b], "#000000", 1.2);
    for (const auto& gp : plan.points) svg.dot(gp.p, 4.5, "#000000");
    return svg.finish();
}

// Phase portrait: located cycles plus auxiliary orbits.
inline std::string portrait_svg(double r_hat, const std::vector<std::vector<Vec2>>& cycles,
                                const std::vector<std::vector<Vec2>>& orbits) {
    SvgCanvas svg(r_hat);
    const auto& palette = component_palette();
    for (std::size_t i = 0; i < orbits.size(); ++i) svg.polyline(orbits[i], "#aaaaaa", 0.8);
    for (std::size_t i = 0; i < cycles.size(); ++i)
        svg.polyline(cycles[i], palette[i % palette.size()], 1.6);
    return svg.finish();
}

}  // namespace lps
