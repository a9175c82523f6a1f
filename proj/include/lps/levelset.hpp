#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "lps/curve_trace.hpp"
#include "lps/family.hpp"
#include "lps/hausdorff.hpp"
#include "lps/variety.hpp"

namespace lps {

struct LevelsetOptions {
    double residual_tol = 1e-10;
    int subdivision = 2;
    int dilation = 2;
    double merge_cell_diagonals = 1.5;
    double regularity_tol = 1e-6;
};

// Polyline approximation of G_lambda = {H(., ., lambda) = 0} on the window
// [-2*R_hat, 2*R_hat]^2 (every level curve is compact and ends up inside
// twice the disk radius for small lambda, so the window suffices).
struct LevelSetTrace {
    double lambda = 0.0;
    Rational alpha = 0;
    TracedCurve curve;
    bool empty_level_set = false;  // reported, never thrown
    double r_hat = 0.0;
    double residual_tol_used = 0.0;

    int component_count() const { return curve.component_count; }
    double min_grad_norm() const { return curve.min_grad_norm; }
    std::vector<Vec2> point_set() const { return curve.point_set(); }
};

namespace detail {

inline double coefficient_magnitude(const Polynomial& p, double box) {
    double m = 0.0;
    for (const auto& [mono, c] : p.terms()) {
        m += std::abs(to_double(c)) * std::pow(std::max(1.0, box), mono.degree_total());
    }
    return m;
}

}  // namespace detail

inline ScalarField compile_H(const FamilySpec& spec, double lambda) {
    auto assign = spec.assignments();
    assign[kVarLambda] = lambda;
    return ScalarField(spec.H, assign);
}

inline LevelSetTrace trace_levelset(const FamilySpec& spec, double lambda, int resolution,
                                    const LevelsetOptions& opt = {}) {
    if (!(lambda > 0.0)) throw Error("trace_levelset: lambda must be positive");
    LevelSetTrace out;
    out.lambda = lambda;
    out.alpha = spec.alpha;
    out.r_hat = spec.r_hat;

    // For very small lambda the zero level lives below the double rounding
    // floor of the big coefficients, so the acceptance tolerance opens up
    // with it rather than demanding the impossible.
    double tol = opt.residual_tol;
    if (lambda < 1e-6) {
        double floor_ld = 1e-18 * detail::coefficient_magnitude(spec.H, 2.0 * spec.r_hat);
        tol = std::max(tol, floor_ld);
    }
    out.residual_tol_used = tol;

    ScalarField field = compile_H(spec, lambda);
    Window win{-2.0 * spec.r_hat, -2.0 * spec.r_hat, 4.0 * spec.r_hat};
    TraceOptions topt;
    topt.resolution = resolution;
    topt.residual_tol = tol;
    topt.subdivision = opt.subdivision;
    topt.dilation = opt.dilation;
    topt.merge_cell_diagonals = opt.merge_cell_diagonals;
    out.curve = trace_implicit(field, win, topt);
    out.empty_level_set = out.curve.empty();
    return out;
}

// Independent component count: 8-connected flood fill over the rasterized
// set of cells that either straddle a sign change or have |H| below a
// lambda-scaled bridging threshold (sub-grid necks near gluing points sit
// well under it, genuinely separated tubes well above). Only groups that
// contain a sign change count as curve components.
inline int component_count_oracle(const FamilySpec& spec, double lambda, int resolution,
                                  double bridge_factor = 0.1) {
    ScalarField field = compile_H(spec, lambda);
    Window win{-2.0 * spec.r_hat, -2.0 * spec.r_hat, 4.0 * spec.r_hat};
    const int n = resolution;
    const double h = win.size / n;
    const double tau = bridge_factor * lambda;

    std::vector<double> corner(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            corner[static_cast<std::size_t>(j) * (n + 1) + i] = field(win.x0 + i * h, win.y0 + j * h);

    // 0 = unmarked, 1 = near-zero bridge, 2 = sign change
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            bool neg = false, pos = false;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di)
                    (corner[static_cast<std::size_t>(j + dj) * (n + 1) + i + di] < 0.0 ? neg : pos) = true;
            if (neg && pos) {
                mark[static_cast<std::size_t>(j) * n + i] = 2;
            } else if (std::abs(field(win.x0 + (i + 0.5) * h, win.y0 + (j + 0.5) * h)) < tau) {
                mark[static_cast<std::size_t>(j) * n + i] = 1;
            }
        }
    }

    auto idx = [n](int i, int j) { return static_cast<std::size_t>(j) * n + i; };
    std::vector<int> group(static_cast<std::size_t>(n) * n, -1);
    int groups = 0, counted = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (!mark[idx(i, j)] || group[idx(i, j)] >= 0) continue;
            int g = groups++;
            bool has_sign_change = false;
            std::vector<std::pair<int, int>> stack{{i, j}};
            group[idx(i, j)] = g;
            while (!stack.empty()) {
                auto [ci, cj] = stack.back();
                stack.pop_back();
                if (mark[idx(ci, cj)] == 2) has_sign_change = true;
                for (int dj = -1; dj <= 1; ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        int ni = ci + di, nj = cj + dj;
                        if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                        if (!mark[idx(ni, nj)] || group[idx(ni, nj)] >= 0) continue;
                        group[idx(ni, nj)] = g;
                        stack.emplace_back(ni, nj);
                    }
                }
            }
            if (has_sign_change) ++counted;
        }
    }
    return counted;
}

struct ScheduleRow {
    double lambda = 0.0;
    double hausdorff_to_gamma = 0.0;
    int component_count = 0;
    double min_grad_norm = 0.0;
    std::size_t vertices = 0;
    bool empty = false;
};

struct ScheduleTable {
    std::vector<ScheduleRow> rows;
    bool hausdorff_strictly_decreasing = true;
    bool component_count_stable = true;  // constant over the schedule
};

// One trace per lambda; distances are to the traced Gamma point set.
inline ScheduleTable convergence_schedule(const FamilySpec& spec, const GammaTrace& gamma,
                                          const std::vector<double>& lambdas, int resolution,
                                          const LevelsetOptions& opt = {}) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw Error("schedule: lambda values must be positive");
        if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
            throw Error("schedule: lambda values must be strictly decreasing");
    }
    ScheduleTable table;
    std::vector<Vec2> gamma_pts = gamma.point_set();
    for (double lam : lambdas) {
        LevelSetTrace trace = trace_levelset(spec, lam, resolution, opt);
        ScheduleRow row;
        row.lambda = lam;
        row.empty = trace.empty_level_set;
        row.vertices = trace.curve.vertex_count;
        row.component_count = trace.component_count();
        row.min_grad_norm = trace.min_grad_norm();
        row.hausdorff_to_gamma = row.empty ? std::numeric_limits<double>::infinity()
                                           : hausdorff(trace.point_set(), gamma_pts);
        table.rows.push_back(row);
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (!(table.rows[i].hausdorff_to_gamma < table.rows[i - 1].hausdorff_to_gamma))
            table.hausdorff_strictly_decreasing = false;
        if (table.rows[i].component_count != table.rows[0].component_count)
            table.component_count_stable = false;
    }
    return table;
}

struct RegularityRow {
    double lambda = 0.0;
    double min_grad_norm = 0.0;
    bool ok = false;
};

// min |grad H| over traced vertices, per lambda, against the regularity
// tolerance. Resampling alpha on failure is the pipeline's job.
inline std::pair<bool, std::vector<RegularityRow>> regularity_check(
    const FamilySpec& spec, const std::vector<double>& lambdas, int resolution,
    const LevelsetOptions& opt = {}) {
    std::vector<RegularityRow> rows;
    bool all_ok = true;
    for (double lam : lambdas) {
        LevelSetTrace trace = trace_levelset(spec, lam, resolution, opt);
        RegularityRow row;
        row.lambda = lam;
        row.min_grad_norm = trace.empty_level_set ? 0.0 : trace.min_grad_norm();
        row.ok = !trace.empty_level_set && row.min_grad_norm > opt.regularity_tol;
        all_ok = all_ok && row.ok;
        rows.push_back(row);
    }
    return {all_ok, rows};
}

struct ProbeOptions {
    int base_resolution = 512;
    double window_factor = 1.4;     // window half-width = factor * radius
    double merge_cell_diagonals = 3.0;
    int subdivision = 2;
    double residual_tol = 1e-10;
};

// Local arc count: re-traces H on a small high-resolution window around the
// probe center and counts the connected curves that enter the probe disk.
// Near a gluing point the two glued branches give 2; at a transversal
// boundary crossing of Gamma the single closing parabola gives 1.
inline int gluing_probe(const FamilySpec& spec, const Vec2& center, double lambda, double radius,
                        const ProbeOptions& opt = {}) {
    if (!(lambda > 0.0)) throw Error("gluing_probe: lambda must be positive");
    if (!(radius > 0.0)) throw Error("gluing_probe: radius must be positive");
    ScalarField field = compile_H(spec, lambda);
    double half = opt.window_factor * radius;
    Window win{center.x - half, center.y - half, 2.0 * half};
    TraceOptions topt;
    topt.resolution = opt.base_resolution;
    topt.residual_tol = opt.residual_tol;
    topt.subdivision = opt.subdivision;
    topt.merge_cell_diagonals = opt.merge_cell_diagonals;
    TracedCurve curve = trace_implicit(field, win, topt);

    std::vector<bool> enters(static_cast<std::size_t>(curve.component_count), false);
    for (std::size_t pl = 0; pl < curve.polylines.size(); ++pl) {
        for (const auto& v : curve.polylines[pl]) {
            if (dist(v, center) <= radius) {
                enters[curve.component_of[pl]] = true;
                break;
            }
        }
    }
    int count = 0;
    for (bool b : enters) count += b;
    return count;
}

}  // namespace lps
