#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lps/curve_trace.hpp"
#include "lps/parser.hpp"
#include "lps/polynomial.hpp"

namespace lps {

struct VarietyOptions {
    double residual_tol = 1e-12;
    double grad_tol = 1e-6;
    double transversality_tol = 1e-8;
    int subdivision = 2;
};

// Gamma = Z(f) intersected with the closed disk of radius R, as traced arcs
// plus the located singular and boundary points.
struct GammaTrace {
    TracedCurve curve;
    std::vector<Vec2> singular_points;   // clustered zeros of grad f on Gamma
    std::vector<Vec2> boundary_points;   // zeros of f on the circle |p| = R
    std::vector<double> boundary_transversality;  // <grad f(p)^perp, p> per point
    bool boundary_degenerate = false;    // Z(f) appears to contain the circle
    bool close_singular_clusters = false;  // two clusters within 4 grid cells
    double radius = 0.0;
    double r_hat = 0.0;   // ceil(sqrt(R^2)), the trace window half-width
    double cell = 0.0;
    int resolution = 0;

    std::vector<Vec2> point_set() const {
        std::vector<Vec2> pts = curve.point_set();
        pts.insert(pts.end(), singular_points.begin(), singular_points.end());
        pts.insert(pts.end(), boundary_points.begin(), boundary_points.end());
        return pts;
    }

    bool empty() const {
        return curve.vertex_count == 0 && singular_points.empty() && boundary_points.empty();
    }
};

struct HypothesisReport {
    bool h1_ok = false;  // f analytic on a neighborhood of the disk
    bool h2_ok = false;  // Gamma non-empty
    bool h3_ok = false;  // finitely many singular points (stable under refinement)
    bool h4_ok = false;  // finite, transversal boundary crossings
    std::string h3_witness;
    std::string h4_witness;
    std::size_t singular_count = 0;
    std::size_t boundary_count = 0;
    bool close_singular_clusters = false;

    bool all_ok() const { return h1_ok && h2_ok && h3_ok && h4_ok; }
};

namespace detail {

// Second-order data for Newton on grad f = 0.
struct HessianField {
    CompiledXY fxx, fxy, fyy;
    explicit HessianField(const Polynomial& f)
        : fxx(f.differentiate(kVarX).differentiate(kVarX), {}),
          fxy(f.differentiate(kVarX).differentiate(kVarY), {}),
          fyy(f.differentiate(kVarY).differentiate(kVarY), {}) {}
};

// Damped Newton iteration for grad f = 0; accepts only genuine singular
// points of the curve: |f| and |grad f| both below their tolerances.
inline bool refine_singular(const ScalarField& f, const HessianField& hess, Vec2 p, double max_move,
                            const VarietyOptions& opt, Vec2& out) {
    Vec2 start = p;
    for (int it = 0; it < 40; ++it) {
        Vec2 g = f.gradient(p);
        if (g.norm() < opt.grad_tol * 0.1) break;
        double a = hess.fxx.eval(p.x, p.y), b = hess.fxy.eval(p.x, p.y), c = hess.fyy.eval(p.x, p.y);
        double det = a * c - b * b;
        if (std::abs(det) < 1e-14) return false;
        Vec2 step{(-g.x * c + g.y * b) / det, (g.x * b - g.y * a) / det};
        double gn = g.norm();
        Vec2 q = p + step;
        // Crude damping: halve the step while the gradient norm grows.
        for (int d = 0; d < 5 && f.gradient(q).norm() > gn; ++d) {
            step = step * 0.5;
            q = p + step;
        }
        p = q;
        if (dist(p, start) > max_move) return false;
    }
    if (f.gradient(p).norm() >= opt.grad_tol) return false;
    if (std::abs(static_cast<double>(f.value_ld(p))) >= opt.residual_tol) return false;
    out = p;
    return true;
}

// Scans the circle |p| = R for zeros of f. Sign changes are bisected; flat
// near-zero local minima (tangential contact) get a few Newton steps in the
// angle. Sets `degenerate` when more than a quarter of the samples vanish.
inline std::vector<Vec2> scan_circle(const ScalarField& f, double R, int samples, double residual_tol,
                                     bool& degenerate) {
    std::vector<double> vals(samples);
    double scale = 0.0;
    for (int k = 0; k < samples; ++k) {
        double th = 2.0 * M_PI * k / samples;
        vals[k] = f(R * std::cos(th), R * std::sin(th));
        scale = std::max(scale, std::abs(vals[k]));
    }
    double near_zero = 1e-9 * std::max(scale, 1e-30);
    int flat = 0;
    for (double v : vals)
        if (std::abs(v) < near_zero) ++flat;
    degenerate = (scale == 0.0) || (flat > samples / 4);
    if (degenerate) return {};

    auto value_at = [&](double th) { return f(R * std::cos(th), R * std::sin(th)); };
    auto value_ld_at = [&](double th) {
        return f.value_ld({R * std::cos(th), R * std::sin(th)});
    };

    std::vector<double> hits;
    double step = 2.0 * M_PI / samples;
    for (int k = 0; k < samples; ++k) {
        double a = 2.0 * M_PI * k / samples, b = a + step;
        double va = vals[k], vb = vals[(k + 1) % samples];
        if ((va < 0.0) != (vb < 0.0)) {
            for (int it = 0; it < 80; ++it) {
                double m = 0.5 * (a + b);
                double vm = value_at(m);
                if ((va < 0.0) != (vm < 0.0)) {
                    b = m;
                    vb = vm;
                } else {
                    a = m;
                    va = vm;
                }
            }
            hits.push_back(0.5 * (a + b));
        } else if (std::abs(va) < 1e-6 * std::max(scale, 1e-30) &&
                   std::abs(va) <= std::abs(vb) &&
                   std::abs(va) <= std::abs(vals[(k + samples - 1) % samples])) {
            // Tangential candidate: Newton on f along the circle.
            double th = a;
            for (int it = 0; it < 60; ++it) {
                Vec2 p{R * std::cos(th), R * std::sin(th)};
                Vec2 g = f.gradient(p);
                double df = dot(g, Vec2{-p.y, p.x});  // d/dtheta
                double v = f(p.x, p.y);
                if (std::abs(df) < 1e-300) break;
                th -= v / df;
            }
            if (std::abs(static_cast<double>(value_ld_at(th))) < residual_tol) hits.push_back(th);
        }
    }

    std::sort(hits.begin(), hits.end());
    std::vector<Vec2> pts;
    double min_sep = step * 0.5;
    for (double th : hits) {
        Vec2 p{R * std::cos(th), R * std::sin(th)};
        bool dup = false;
        for (const auto& q : pts)
            if (dist(p, q) < min_sep * R) dup = true;
        if (!dup && std::abs(static_cast<double>(f.value_ld(p))) < residual_tol) pts.push_back(p);
    }
    return pts;
}

}  // namespace detail

// Traces Z(f) inside the closed disk of radius sqrt(r2) on a
// (resolution x resolution) grid over [-R_hat, R_hat]^2.
inline GammaTrace extract_gamma(const Polynomial& f, const Rational& r2, int resolution,
                                const VarietyOptions& opt = {}) {
    if (f.is_zero()) throw EmptyGammaError("f is the zero polynomial");
    if (f.uses_var(kVarLambda) || f.uses_var(kVarAlpha))
        throw Error("extract_gamma: f must be a polynomial in x, y only");
    if (resolution < 64) throw Error("extract_gamma: resolution must be >= 64");
    if (r2 <= 0) throw Error("extract_gamma: R^2 must be positive");

    GammaTrace out;
    out.radius = std::sqrt(to_double(r2));
    out.r_hat = std::ceil(out.radius);
    out.resolution = resolution;

    ScalarField field(f, {});
    Window win{-out.r_hat, -out.r_hat, 2.0 * out.r_hat};
    TraceOptions topt;
    topt.resolution = resolution;
    topt.residual_tol = opt.residual_tol;
    topt.subdivision = opt.subdivision;
    topt.clip_radius = out.radius;
    out.curve = trace_implicit(field, win, topt);
    out.cell = out.curve.cell;

    // Boundary crossings.
    out.boundary_points = detail::scan_circle(field, out.radius, std::max(4 * resolution, 256),
                                              opt.residual_tol, out.boundary_degenerate);
    for (const auto& p : out.boundary_points) {
        Vec2 g = field.gradient(p);
        out.boundary_transversality.push_back(dot(g.perp(), p));
    }

    // Singular points: Newton on grad f = 0 from every sign-change cell
    // center, clustered within two cells.
    detail::HessianField hess(f);
    const double h = out.cell;
    std::vector<Vec2> found;
    const int n = resolution;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Vec2 c{win.x0 + (i + 0.5) * h, win.y0 + (j + 0.5) * h};
            if (c.norm() > out.radius + 2.0 * h) continue;
            bool neg = false, pos = false;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di)
                    (field(win.x0 + (i + di) * h, win.y0 + (j + dj) * h) < 0.0 ? neg : pos) = true;
            bool near_zero_min = std::abs(field(c.x, c.y)) < 100.0 * h * h;
            if (!(neg && pos) && !near_zero_min) continue;
            Vec2 s;
            if (detail::refine_singular(field, hess, c, 3.0 * h, opt, s)) {
                if (s.norm() <= out.radius + 2.0 * h) found.push_back(s);
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const Vec2& a, const Vec2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    detail::UnionFind uf(found.size());
    for (std::size_t a = 0; a < found.size(); ++a)
        for (std::size_t b = a + 1; b < found.size(); ++b)
            if (dist(found[a], found[b]) < 2.0 * h) uf.unite(a, b);
    std::map<std::size_t, std::vector<Vec2>> clusters;
    for (std::size_t a = 0; a < found.size(); ++a) clusters[uf.find(a)].push_back(found[a]);
    for (const auto& [root, pts] : clusters) {
        Vec2 centroid{0, 0};
        for (const auto& p : pts) centroid = centroid + p;
        out.singular_points.push_back(centroid * (1.0 / pts.size()));
    }
    for (std::size_t a = 0; a < out.singular_points.size(); ++a)
        for (std::size_t b = a + 1; b < out.singular_points.size(); ++b)
            if (dist(out.singular_points[a], out.singular_points[b]) < 4.0 * h)
                out.close_singular_clusters = true;

    if (out.empty()) throw EmptyGammaError("Z(f) does not meet the closed disk at this resolution");
    return out;
}

// Checks the four standing hypotheses on (f, R). h3 uses stability of the
// singular cluster count under one resolution doubling as the finiteness
// proxy; h4 needs finitely many transversal boundary crossings.
inline HypothesisReport check_hypotheses(const Polynomial& f, const Rational& r2,
                                         const GammaTrace& trace, const VarietyOptions& opt = {}) {
    HypothesisReport rep;
    rep.h1_ok = !f.is_zero();  // polynomials are analytic on the whole plane
    rep.h2_ok = !trace.empty();
    rep.singular_count = trace.singular_points.size();
    rep.boundary_count = trace.boundary_points.size();
    rep.close_singular_clusters = trace.close_singular_clusters;

    if (rep.h2_ok) {
        // Stability proxy for finiteness: one resolution doubling, comparing
        // downward instead when already at the grid cap.
        int refined_res = trace.resolution <= 4096 ? 2 * trace.resolution : trace.resolution / 2;
        GammaTrace refined = extract_gamma(f, r2, refined_res, opt);
        rep.h3_ok = refined.singular_points.size() == trace.singular_points.size();
        if (!rep.h3_ok)
            rep.h3_witness = "singular cluster count changed under refinement: " +
                             std::to_string(trace.singular_points.size()) + " -> " +
                             std::to_string(refined.singular_points.size());
        if (trace.close_singular_clusters)
            rep.h3_witness += (rep.h3_witness.empty() ? "" : "; ") +
                              std::string("two singular clusters within 4 grid cells");
    }

    if (trace.boundary_degenerate) {
        rep.h4_ok = false;
        rep.h4_witness = "Z(f) appears to contain the boundary circle";
    } else {
        rep.h4_ok = true;
        for (std::size_t i = 0; i < trace.boundary_points.size(); ++i) {
            if (std::abs(trace.boundary_transversality[i]) <= opt.transversality_tol) {
                rep.h4_ok = false;
                rep.h4_witness = "tangential boundary crossing near (" +
                                 std::to_string(trace.boundary_points[i].x) + ", " +
                                 std::to_string(trace.boundary_points[i].y) + ")";
                break;
            }
        }
    }
    return rep;
}

}  // namespace lps
