#pragma once
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lps/config.hpp"
#include "lps/dynamics.hpp"
#include "lps/family.hpp"
#include "lps/io.hpp"
#include "lps/levelset.hpp"
#include "lps/parser.hpp"
#include "lps/report.hpp"
#include "lps/support.hpp"
#include "lps/variety.hpp"

namespace lps {

constexpr double kProbeRadius = 0.05;
constexpr int kMaxAlphaAttempts = 8;

// Exit codes of the command-line tool.
constexpr int kExitOk = 0;
constexpr int kExitHypothesisFailure = 2;
constexpr int kExitFinding = 3;
constexpr int kExitInternalError = 4;

struct AnalyzeResult {
    Polynomial f;
    GammaTrace gamma;
    HypothesisReport hypotheses;
    int gamma_components = 0;  // any-vertex proximity merge
    bool hypotheses_ok = false;
    bool support_built = false;
    SupportPartition support;
    GluingPlan plan;
};

inline AnalyzeResult run_analyze(const JobConfig& cfg) {
    AnalyzeResult out;
    out.f = parse_polynomial(cfg.f_expr);
    out.gamma = extract_gamma(out.f, cfg.r_squared, cfg.resolution);
    out.hypotheses = check_hypotheses(out.f, cfg.r_squared, out.gamma);
    out.gamma_components =
        proximity_components(out.gamma.curve, 1.5 * out.gamma.cell * std::sqrt(2.0));

    const auto& h = out.hypotheses;
    bool h123 = h.h1_ok && h.h2_ok && h.h3_ok;
    out.hypotheses_ok = cfg.variant == "star" ? h123 : h123 && h.h4_ok;
    if (!h123) return out;  // support needs [i]-[iii]

    auto dec = decompose(out.f, cfg.r_squared, cfg.resolution);
    out.support = build_support(std::move(dec));
    EdgeSet graph = adjacency_graph(out.support);
    EdgeSet tree = spanning_tree(out.support.index_count, graph);
    out.plan = pick_gluing_points(out.support, graph, tree, out.f);
    out.support_built = true;
    return out;
}

struct BuildResult {
    FamilySpec spec;
    IdentityResult identity_alpha;  // alpha (and any float gluing) symbolic
    std::vector<IdentityResult> identity_per_edge;
    bool identity_ok = false;
};

inline FamilySpec build_family(const AnalyzeResult& analyze, const JobConfig& cfg,
                               const Rational& alpha) {
    std::vector<GluingCoordinate> gluing;
    if (cfg.variant == "full" && analyze.support_built) {
        for (const auto& gp : analyze.plan.points)
            gluing.push_back(exactify_gluing(analyze.f, gp.p));
    }
    Variant variant = cfg.variant == "star" ? Variant::kStar : Variant::kFull;
    return make_family(analyze.f, cfg.r_squared, gluing, alpha, variant);
}

inline BuildResult run_build(const AnalyzeResult& analyze, const JobConfig& cfg) {
    BuildResult out;
    out.spec = build_family(analyze, cfg, cfg.alpha_start());
    out.identity_alpha = verify_identity(out.spec, IdentityMode{true, {}});
    out.identity_ok = out.identity_alpha.ok;
    // Per-edge symbolic reruns stay affordable only while the base family is
    // exact; float gluing slots are already symbolic in the alpha run above.
    bool all_exact = true;
    for (const auto& g : out.spec.gluing) all_exact = all_exact && g.exact.has_value();
    if (all_exact && out.spec.H.term_count() < 20'000) {
        for (std::size_t e = 0; e < out.spec.gluing.size(); ++e) {
            IdentityResult r =
                verify_identity(out.spec, IdentityMode{true, {static_cast<int>(e)}});
            out.identity_ok = out.identity_ok && r.ok;
            out.identity_per_edge.push_back(r);
        }
    }
    return out;
}

struct ProbeResult {
    std::string kind;  // "gluing" or "boundary"
    Vec2 center;
    int arcs = 0;
    int expected = 0;
    bool ok = false;
};

struct CycleSummary {
    Vec2 seed;
    bool located = false;
    std::string failure;
    Vec2 landing;
    double period = 0.0;
    double displacement = 0.0;
    double max_h = 0.0;
    double divergence_plus = 0.0;
    double divergence_minus = 0.0;
    std::vector<Vec2> orbit;  // subsampled for rendering
};

struct VerifyResult {
    JobConfig cfg;
    AnalyzeResult analyze;
    BuildResult build;
    std::vector<std::string> alpha_history;
    bool regularity_ok = false;
    bool persistent_irregularity = false;
    std::vector<RegularityRow> regularity;
    ScheduleTable schedule;
    int trace_components = 0;   // at the smallest lambda
    int oracle_components = 0;  // independent raster count at the smallest lambda
    bool counts_agree = false;
    std::vector<ProbeResult> probes;
    bool probes_ok = true;
    std::vector<CycleSummary> cycles;
    int distinct_cycles = 0;
    bool cycle_census_ok = false;
    std::vector<std::string> findings;
    int exit_code = kExitOk;
};

namespace detail {

inline std::vector<Vec2> component_seeds(const LevelSetTrace& trace, const ScalarField& h_field) {
    // One seed per component, pushed off the curve along the gradient.
    std::vector<int> best_polyline(static_cast<std::size_t>(trace.curve.component_count), -1);
    for (std::size_t pl = 0; pl < trace.curve.polylines.size(); ++pl) {
        int c = trace.curve.component_of[pl];
        if (best_polyline[c] < 0 ||
            trace.curve.polylines[pl].size() > trace.curve.polylines[best_polyline[c]].size())
            best_polyline[c] = static_cast<int>(pl);
    }
    std::vector<Vec2> seeds;
    for (int pl : best_polyline) {
        if (pl < 0) continue;
        const auto& pts = trace.curve.polylines[pl];
        Vec2 v = pts[pts.size() / 2];
        Vec2 g = h_field.gradient(v);
        double gn = g.norm();
        if (gn == 0.0) continue;
        seeds.push_back(v + g * (1.5 * trace.curve.cell / gn));
    }
    return seeds;
}

inline std::vector<Vec2> subsample(const std::vector<Vec2>& pts, std::size_t cap = 4000) {
    if (pts.size() <= cap) return pts;
    std::vector<Vec2> out;
    std::size_t stride = pts.size() / cap + 1;
    for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
    return out;
}

}  // namespace detail

// The full pipeline: analyze, build, identity and degrees, regularity with
// alpha resampling, the lambda schedule, component counts against the raster
// oracle, local structure probes, and the cycle census.
inline VerifyResult run_verify(const JobConfig& cfg) {
    VerifyResult out;
    out.cfg = cfg;
    out.analyze = run_analyze(cfg);
    if (!out.analyze.hypotheses_ok) {
        out.exit_code = kExitHypothesisFailure;
        out.findings.push_back("hypothesis check failed");
        return out;
    }

    out.build = run_build(out.analyze, cfg);
    if (!out.build.identity_ok) out.findings.push_back("field identity residual is nonzero");
    if (out.build.spec.ledger.violated)
        out.findings.push_back("degree bound: " + out.build.spec.ledger.note);

    // Regularity across the schedule; resample alpha on failure.
    std::mt19937_64 rng(cfg.seed);
    out.alpha_history.push_back(to_string(out.build.spec.alpha));
    auto [reg_ok, reg_rows] = regularity_check(out.build.spec, cfg.lambda_schedule, cfg.resolution);
    out.regularity = reg_rows;
    out.regularity_ok = reg_ok;
    for (int attempt = 0; attempt < kMaxAlphaAttempts && !out.regularity_ok; ++attempt) {
        Rational alpha = resample_alpha(rng);
        out.alpha_history.push_back(to_string(alpha));
        FamilySpec respec = build_family(out.analyze, cfg, alpha);
        auto [ok, rows] = regularity_check(respec, cfg.lambda_schedule, cfg.resolution);
        if (ok) {
            // Adopt the first regular draw; otherwise stay on the configured
            // alpha so the reported family remains the canonical one.
            out.build.spec = std::move(respec);
            out.regularity = rows;
            out.regularity_ok = true;
        }
    }
    if (!out.regularity_ok) {
        out.persistent_irregularity = true;
        out.findings.push_back("persistent irregularity: min |grad H| stayed below tolerance after " +
                               std::to_string(kMaxAlphaAttempts) + " alpha draws");
    }

    const FamilySpec& spec = out.build.spec;
    out.schedule = convergence_schedule(spec, out.analyze.gamma, cfg.lambda_schedule, cfg.resolution);
    if (!out.schedule.hausdorff_strictly_decreasing)
        out.findings.push_back("Hausdorff distances are not strictly decreasing over the schedule");

    double lambda_min = cfg.lambda_schedule.back();
    out.trace_components = out.schedule.rows.back().component_count;
    out.oracle_components = component_count_oracle(spec, lambda_min, cfg.resolution);
    out.counts_agree = out.trace_components == out.oracle_components;
    if (!out.counts_agree)
        out.findings.push_back("component counts disagree: trace " +
                               std::to_string(out.trace_components) + " vs oracle " +
                               std::to_string(out.oracle_components));

    // Local structure: two arcs near each gluing point, one arc at each
    // boundary crossing of Gamma.
    for (const auto& g : spec.gluing) {
        ProbeResult pr;
        pr.kind = "gluing";
        pr.center = g.approx;
        pr.expected = 2;
        pr.arcs = gluing_probe(spec, g.approx, lambda_min, kProbeRadius);
        pr.ok = pr.arcs == pr.expected;
        out.probes_ok = out.probes_ok && pr.ok;
        out.probes.push_back(pr);
    }
    for (const auto& b : out.analyze.gamma.boundary_points) {
        ProbeResult pr;
        pr.kind = "boundary";
        pr.center = b;
        pr.expected = 1;
        pr.arcs = gluing_probe(spec, b, lambda_min, kProbeRadius);
        pr.ok = pr.arcs == pr.expected;
        out.probes_ok = out.probes_ok && pr.ok;
        out.probes.push_back(pr);
    }
    if (!out.probes_ok) out.findings.push_back("local structure probes deviate from expected arc counts");

    // Cycle census at the smallest lambda: one backward-capture seed per
    // traced component.
    CompiledFamily fam(spec, lambda_min);
    LevelSetTrace last_trace = trace_levelset(spec, lambda_min, cfg.resolution);
    std::vector<CycleResult> located;
    for (const Vec2& seed : detail::component_seeds(last_trace, fam.H)) {
        CycleSummary cs;
        cs.seed = seed;
        try {
            CycleResult c = locate_cycle(fam, seed);
            cs.located = true;
            cs.landing = c.landing;
            cs.period = c.period;
            cs.displacement = c.return_displacement;
            cs.max_h = c.max_h_on_cycle;
            cs.divergence_plus = c.divergence_plus;
            cs.divergence_minus = c.divergence_minus;
            cs.orbit = detail::subsample(c.cycle_points);
            located.push_back(std::move(c));
        } catch (const Error& e) {
            cs.failure = e.what();
        }
        out.cycles.push_back(std::move(cs));
    }
    out.distinct_cycles =
        distinct_cycle_count(located, 0.01 * std::max(spec.r_hat, 1.0));
    out.cycle_census_ok = out.distinct_cycles == out.trace_components &&
                          static_cast<int>(located.size()) == static_cast<int>(out.cycles.size());
    if (!out.cycle_census_ok)
        out.findings.push_back("cycle census: located " + std::to_string(out.distinct_cycles) +
                               " distinct cycles for " + std::to_string(out.trace_components) +
                               " traced components");

    if (!out.findings.empty()) out.exit_code = kExitFinding;
    return out;
}

inline Json hypotheses_json(const AnalyzeResult& analyze) {
    const HypothesisReport& h = analyze.hypotheses;
    Json j;
    j["h1_ok"] = h.h1_ok;
    j["h2_ok"] = h.h2_ok;
    j["h3_ok"] = h.h3_ok;
    j["h4_ok"] = h.h4_ok;
    j["h3_witness"] = h.h3_witness;
    j["h4_witness"] = h.h4_witness;
    j["singular_points"] = Json::array();
    for (const auto& p : analyze.gamma.singular_points) j["singular_points"].push_back(vec2_json(p));
    j["boundary_points"] = Json::array();
    for (const auto& p : analyze.gamma.boundary_points) j["boundary_points"].push_back(vec2_json(p));
    j["close_singular_clusters"] = h.close_singular_clusters;
    return j;
}

inline Json support_json(const AnalyzeResult& analyze) {
    Json j;
    if (!analyze.support_built) return j;
    j["index_count"] = analyze.support.index_count;
    Json graph = Json::array(), tree = Json::array(), points = Json::array();
    for (const auto& [a, b] : analyze.plan.graph_edges) graph.push_back(Json::array({a, b}));
    for (const auto& [a, b] : analyze.plan.tree_edges) tree.push_back(Json::array({a, b}));
    for (const auto& gp : analyze.plan.points) {
        Json p;
        p["edge"] = Json::array({gp.edge.first, gp.edge.second});
        p["x"] = gp.p.x;
        p["y"] = gp.p.y;
        p["f_abs"] = gp.f_abs;
        p["grad_norm"] = gp.grad_norm;
        points.push_back(p);
    }
    j["adjacency_edges"] = graph;
    j["tree_edges"] = tree;
    j["gluing_points"] = points;
    return j;
}

// The full machine-readable verification report. Every numeric verdict
// carries the tolerance it was checked against; no timestamps, so reruns
// with the same config and seed are byte-identical.
inline Json verify_report_json(const VerifyResult& v) {
    Json j;
    j["config"] = Json::parse("{}");
    j["config"]["text"] = v.cfg.canonical_text();
    j["config"]["hash"] = v.cfg.content_hash();

    j["hypotheses"] = hypotheses_json(v.analyze);
    Json gamma;
    gamma["resolution"] = v.analyze.gamma.resolution;
    gamma["vertices"] = v.analyze.gamma.curve.vertex_count;
    gamma["arcs"] = v.analyze.gamma.curve.polylines.size();
    gamma["components"] = v.analyze.gamma_components;
    gamma["residual_tol"] = 1e-12;
    j["gamma"] = gamma;
    j["support"] = support_json(v.analyze);

    if (v.analyze.hypotheses_ok) {
        Json fam = family_to_json(v.build.spec);
        fam.erase("P");  // the full field text lives in the family file
        fam.erase("Q");
        j["family"] = fam;
        Json ident;
        ident["ok"] = v.build.identity_ok;
        ident["tolerance"] = 0;
        ident["alpha_symbolic"] = v.build.identity_alpha.ok;
        Json per_edge = Json::array();
        for (std::size_t e = 0; e < v.build.identity_per_edge.size(); ++e) {
            Json r;
            r["edge_index"] = e;
            r["ok"] = v.build.identity_per_edge[e].ok;
            r["direct_route"] = v.build.identity_per_edge[e].direct_route;
            per_edge.push_back(r);
        }
        ident["per_edge_symbolic"] = per_edge;
        j["identity"] = ident;

        Json reg;
        reg["ok"] = v.regularity_ok;
        reg["tolerance"] = 1e-6;
        reg["alpha_history"] = v.alpha_history;
        reg["persistent_irregularity"] = v.persistent_irregularity;
        Json rows = Json::array();
        for (const auto& r : v.regularity) {
            Json row;
            row["lambda"] = r.lambda;
            row["min_grad_norm"] = r.min_grad_norm;
            row["ok"] = r.ok;
            rows.push_back(row);
        }
        reg["rows"] = rows;
        j["regularity"] = reg;

        Json sched;
        Json srows = Json::array();
        for (const auto& r : v.schedule.rows) {
            Json row;
            row["lambda"] = r.lambda;
            row["hausdorff_to_gamma"] = r.hausdorff_to_gamma;
            row["component_count"] = r.component_count;
            row["min_grad_norm"] = r.min_grad_norm;
            row["vertices"] = r.vertices;
            row["empty"] = r.empty;
            srows.push_back(row);
        }
        sched["rows"] = srows;
        sched["hausdorff_strictly_decreasing"] = v.schedule.hausdorff_strictly_decreasing;
        sched["component_count_stable"] = v.schedule.component_count_stable;
        j["schedule"] = sched;

        Json counts;
        counts["lambda"] = v.cfg.lambda_schedule.back();
        counts["trace_components"] = v.trace_components;
        counts["oracle_components"] = v.oracle_components;
        counts["agree"] = v.counts_agree;
        j["component_counts"] = counts;

        Json probes = Json::array();
        for (const auto& p : v.probes) {
            Json pr;
            pr["kind"] = p.kind;
            pr["center"] = vec2_json(p.center);
            pr["radius"] = kProbeRadius;
            pr["arcs"] = p.arcs;
            pr["expected"] = p.expected;
            pr["ok"] = p.ok;
            probes.push_back(pr);
        }
        j["probes"] = probes;

        Json cycles;
        Json clist = Json::array();
        for (const auto& c : v.cycles) {
            Json ci;
            ci["seed"] = vec2_json(c.seed);
            ci["located"] = c.located;
            if (c.located) {
                ci["landing"] = vec2_json(c.landing);
                ci["period"] = c.period;
                ci["return_displacement"] = c.displacement;
                ci["max_h_on_cycle"] = c.max_h;
                ci["divergence_plus"] = c.divergence_plus;
                ci["divergence_minus"] = c.divergence_minus;
            } else {
                ci["failure"] = c.failure;
            }
            clist.push_back(ci);
        }
        cycles["orbits"] = clist;
        cycles["distinct"] = v.distinct_cycles;
        cycles["matches_trace_components"] = v.cycle_census_ok;
        j["cycles"] = cycles;

        // Claim-level verdicts: a single connected family (the gluing
        // construction) versus a union of per-component families.
        Json verdict;
        verdict["connected_limit_set"] =
            v.counts_agree && v.trace_components == 1 && v.schedule.hausdorff_strictly_decreasing;
        verdict["union_of_limit_sets"] =
            v.counts_agree && v.schedule.hausdorff_strictly_decreasing && v.cycle_census_ok;
        j["verdicts"] = verdict;
    }

    j["findings"] = v.findings;
    j["exit_code"] = v.exit_code;
    return j;
}

// Human-readable construction narrative written next to the family files.
inline std::string construction_transcript(const AnalyzeResult& analyze, const FamilySpec& spec) {
    std::ostringstream os;
    os << "input polynomial  f = " << spec.f.to_text() << "\n";
    os << "disk radius^2     R^2 = " << to_string(spec.r2) << "\n";
    os << "hypotheses        [i] " << (analyze.hypotheses.h1_ok ? "ok" : "FAIL") << "  [ii] "
       << (analyze.hypotheses.h2_ok ? "ok" : "FAIL") << "  [iii] "
       << (analyze.hypotheses.h3_ok ? "ok" : "FAIL") << "  [iv] "
       << (analyze.hypotheses.h4_ok ? "ok" : "FAIL") << "\n";
    if (analyze.support_built) {
        os << "support           " << analyze.support.index_count
           << " components (0 = merged exterior)\n";
        os << "adjacency tree    ";
        for (const auto& [a, b] : analyze.plan.tree_edges) os << "{" << a << "," << b << "} ";
        os << "\n";
        for (const auto& gp : analyze.plan.points) {
            os << "gluing point      p_{" << gp.edge.first << "," << gp.edge.second << "} = ("
               << fmt_double(gp.p.x) << ", " << fmt_double(gp.p.y)
               << ")  |f| = " << fmt_double(gp.f_abs) << "  |grad f| = " << fmt_double(gp.grad_norm)
               << "\n";
        }
    }
    os << "variant           " << variant_name(spec.variant) << "\n";
    os << "alpha             " << to_string(spec.alpha) << "\n";
    os << "H(x,y,lambda) = " << spec.H.to_text() << "\n";
    os << "field degree      " << spec.ledger.degree_field
       << " (bound " << (spec.variant == Variant::kFull ? spec.ledger.full_bound : spec.ledger.star_exact)
       << ")\n";
    return os.str();
}

}  // namespace lps
