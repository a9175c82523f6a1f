#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lps/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lps;

namespace {

std::string lambda_tag(double lambda) {
    std::string s = fmt_double(lambda, "%.6g");
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '+') c = '_';
        if (c == '-') c = 'm';
    }
    return s;
}

fs::path ensure_out_dir(const JobConfig& cfg, const std::string& override_dir) {
    fs::path dir = override_dir.empty() ? cfg.output_dir : override_dir;
    fs::create_directories(dir);
    return dir;
}

void save_json(const fs::path& path, const Json& j) { write_text_file(path.string(), j.dump(2) + "\n"); }

// Loads a previously built family when its content hash matches; otherwise
// rebuilds from scratch.
FamilySpec load_or_build_family(const JobConfig& cfg, const fs::path& dir, AnalyzeResult& analyze,
                                bool& reused) {
    fs::path family_path = dir / ("family_" + cfg.content_hash() + ".json");
    if (fs::exists(family_path)) {
        std::ifstream in(family_path);
        Json j = Json::parse(in);
        reused = true;
        return family_from_json(j);
    }
    analyze = run_analyze(cfg);
    if (!analyze.hypotheses_ok) throw HypothesisError("hypotheses [i]-[iv] not satisfied");
    reused = false;
    return build_family(analyze, cfg, cfg.alpha_start());
}

int cmd_analyze(const JobConfig& cfg, const std::string& out_override) {
    fs::path dir = ensure_out_dir(cfg, out_override);
    AnalyzeResult analyze = run_analyze(cfg);
    Json j;
    j["config_hash"] = cfg.content_hash();
    j["hypotheses"] = hypotheses_json(analyze);
    j["gamma_components"] = analyze.gamma_components;
    j["support"] = support_json(analyze);
    save_json(dir / ("analyze_" + cfg.content_hash() + ".json"), j);
    write_text_file((dir / ("gamma_" + cfg.content_hash() + ".csv")).string(),
                    curve_csv(analyze.gamma.curve));
    write_text_file((dir / ("gamma_" + cfg.content_hash() + ".svg")).string(),
                    gamma_svg(analyze.gamma));
    std::cout << "hypotheses: [i] " << (analyze.hypotheses.h1_ok ? "ok" : "FAIL") << ", [ii] "
              << (analyze.hypotheses.h2_ok ? "ok" : "FAIL") << ", [iii] "
              << (analyze.hypotheses.h3_ok ? "ok" : "FAIL") << ", [iv] "
              << (analyze.hypotheses.h4_ok ? "ok" : "FAIL") << "\n";
    if (analyze.support_built) {
        std::cout << "support: " << analyze.support.index_count << " components, "
                  << analyze.plan.tree_edges.size() << " tree edges, "
                  << analyze.plan.points.size() << " gluing points\n";
    }
    return analyze.hypotheses_ok ? kExitOk : kExitHypothesisFailure;
}

int cmd_build(const JobConfig& cfg, const std::string& out_override) {
    fs::path dir = ensure_out_dir(cfg, out_override);
    AnalyzeResult analyze = run_analyze(cfg);
    if (!analyze.hypotheses_ok) {
        std::cerr << "build: hypotheses not satisfied\n";
        return kExitHypothesisFailure;
    }
    BuildResult build = run_build(analyze, cfg);
    save_json(dir / ("family_" + cfg.content_hash() + ".json"), family_to_json(build.spec));
    write_text_file((dir / ("transcript_" + cfg.content_hash() + ".txt")).string(),
                    construction_transcript(analyze, build.spec));
    std::cout << "H: " << build.spec.H.term_count() << " terms, field degree "
              << build.spec.ledger.degree_field << ", identity "
              << (build.identity_ok ? "ok" : "FAIL") << "\n";
    if (!build.identity_ok || build.spec.ledger.violated) return kExitFinding;
    return kExitOk;
}

int cmd_trace(const JobConfig& cfg, double lambda, const std::string& out_override) {
    fs::path dir = ensure_out_dir(cfg, out_override);
    AnalyzeResult analyze;
    bool reused = false;
    FamilySpec spec = load_or_build_family(cfg, dir, analyze, reused);
    if (reused) {
        // Gamma is still needed for the figure overlay.
        analyze.f = spec.f;
        analyze.gamma = extract_gamma(spec.f, spec.r2, cfg.resolution);
    }
    LevelSetTrace trace = trace_levelset(spec, lambda, cfg.resolution);
    std::string tag = lambda_tag(lambda);
    write_text_file((dir / ("levelset_" + tag + "_" + cfg.content_hash() + ".csv")).string(),
                    curve_csv(trace.curve));
    std::vector<Vec2> gpts;
    for (const auto& g : spec.gluing) gpts.push_back(g.approx);
    write_text_file((dir / ("levelset_" + tag + "_" + cfg.content_hash() + ".svg")).string(),
                    levelset_svg(trace.curve, analyze.gamma, gpts));
    std::cout << "lambda " << lambda << ": " << trace.component_count() << " components, "
              << trace.curve.vertex_count << " vertices, min |grad H| " << trace.min_grad_norm()
              << (trace.empty_level_set ? " (EMPTY LEVEL SET)" : "") << "\n";
    return kExitOk;
}

int cmd_verify(const JobConfig& cfg, const std::string& out_override) {
    fs::path dir = ensure_out_dir(cfg, out_override);
    VerifyResult v = run_verify(cfg);
    save_json(dir / ("report_" + cfg.content_hash() + ".json"), verify_report_json(v));
    if (v.analyze.hypotheses_ok) {
        save_json(dir / ("family_" + cfg.content_hash() + ".json"), family_to_json(v.build.spec));
        write_text_file((dir / ("transcript_" + cfg.content_hash() + ".txt")).string(),
                        construction_transcript(v.analyze, v.build.spec));
        std::string csv = "lambda,hausdorff_to_gamma,component_count,min_grad_norm,vertices\n";
        for (const auto& r : v.schedule.rows) {
            csv += fmt_double(r.lambda) + "," + fmt_double(r.hausdorff_to_gamma) + "," +
                   std::to_string(r.component_count) + "," + fmt_double(r.min_grad_norm) + "," +
                   std::to_string(r.vertices) + "\n";
        }
        write_text_file((dir / ("schedule_" + cfg.content_hash() + ".csv")).string(), csv);
    }
    for (const auto& line : v.findings) std::cout << "finding: " << line << "\n";
    std::cout << "verify: exit " << v.exit_code << ", report written to "
              << (dir / ("report_" + cfg.content_hash() + ".json")).string() << "\n";
    return v.exit_code;
}

int cmd_render(const JobConfig& cfg, const std::string& out_override) {
    fs::path dir = ensure_out_dir(cfg, out_override);
    AnalyzeResult analyze;
    bool reused = false;
    FamilySpec spec = load_or_build_family(cfg, dir, analyze, reused);
    if (reused) {
        analyze = run_analyze(cfg);
    }
    std::string h = cfg.content_hash();
    write_text_file((dir / ("gamma_" + h + ".svg")).string(), gamma_svg(analyze.gamma));
    if (analyze.support_built)
        write_text_file((dir / ("support_" + h + ".svg")).string(),
                        support_svg(analyze.support, analyze.plan));
    std::vector<Vec2> gpts;
    for (const auto& g : spec.gluing) gpts.push_back(g.approx);
    for (double lambda : cfg.lambda_schedule) {
        LevelSetTrace trace = trace_levelset(spec, lambda, cfg.resolution);
        write_text_file((dir / ("levelset_" + lambda_tag(lambda) + "_" + h + ".svg")).string(),
                        levelset_svg(trace.curve, analyze.gamma, gpts));
    }
    // Phase portrait and cycle trajectories at the smallest lambda.
    double lambda_min = cfg.lambda_schedule.back();
    CompiledFamily fam(spec, lambda_min);
    LevelSetTrace trace = trace_levelset(spec, lambda_min, cfg.resolution);
    std::vector<std::vector<Vec2>> cycles, orbits;
    int cycle_index = 0;
    for (const Vec2& seed : detail::component_seeds(trace, fam.H)) {
        try {
            CycleResult c = locate_cycle(fam, seed);
            Trajectory on_cycle = integrate(fam, c.landing, Direction::kForward, c.period);
            std::string csv = "t,x,y,H\n";
            for (const auto& s : on_cycle.samples) {
                csv += fmt_double(s.t) + "," + fmt_double(s.p.x) + "," + fmt_double(s.p.y) + "," +
                       fmt_double(s.h_value) + "\n";
            }
            write_text_file((dir / ("cycle_" + std::to_string(cycle_index++) + "_" + h + ".csv"))
                                .string(),
                            csv);
            cycles.push_back(detail::subsample(c.cycle_points));
            Trajectory t = integrate(fam, seed, Direction::kForward, c.period);
            std::vector<Vec2> orbit;
            for (const auto& s : t.samples) orbit.push_back(s.p);
            orbits.push_back(detail::subsample(orbit));
        } catch (const Error&) {
            // Portraits are best-effort; failures show up in `verify`.
        }
    }
    write_text_file((dir / ("portrait_" + h + ".svg")).string(),
                    portrait_svg(spec.r_hat, cycles, orbits));
    std::cout << "figures written to " << dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"construction and verification of planar polynomial families whose limit cycles "
                 "converge to a prescribed algebraic curve"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    double lambda = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "job config file")->required();
        sub->add_option("--out", out_dir, "output directory (defaults to the config's output_dir)");
    };
    CLI::App* analyze = app.add_subcommand("analyze", "check hypotheses and build the support");
    add_common(analyze);
    CLI::App* build = app.add_subcommand("build", "construct H and the vector field family");
    add_common(build);
    CLI::App* trace = app.add_subcommand("trace", "trace the level set at one lambda");
    add_common(trace);
    trace->add_option("--lambda", lambda, "parameter value")->required();
    CLI::App* verify = app.add_subcommand("verify", "run the full verification pipeline");
    add_common(verify);
    CLI::App* render = app.add_subcommand("render", "emit SVG figures");
    add_common(render);

    CLI11_PARSE(app, argc, argv);

    std::string stage = app.get_subcommands().front()->get_name();
    try {
        JobConfig cfg = load_config(config_path);
        if (!cfg.lambda_schedule.empty() && cfg.lambda_schedule.back() < 1e-4 &&
            cfg.resolution < 4096) {
            std::cerr << "warning: lambda below 1e-4 needs resolution >= 4096 for a reliable "
                         "trace (configured " << cfg.resolution << ")\n";
        }
        if (analyze->parsed()) return cmd_analyze(cfg, out_dir);
        if (build->parsed()) return cmd_build(cfg, out_dir);
        if (trace->parsed()) return cmd_trace(cfg, lambda, out_dir);
        if (verify->parsed()) return cmd_verify(cfg, out_dir);
        if (render->parsed()) return cmd_render(cfg, out_dir);
    } catch (const HypothesisError& e) {
        std::cerr << stage << ": " << e.what() << "\n";
        return kExitHypothesisFailure;
    } catch (const Error& e) {
        std::cerr << stage << ": " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception& e) {
        std::cerr << stage << ": " << e.what() << "\n";
        return kExitInternalError;
    }
    return kExitInternalError;
}
