#include <catch2/catch_amalgamated.hpp>

#include "lps/pipeline.hpp"

using namespace lps;

namespace {

JobConfig small_cross_config() {
    return parse_config_text(
        "f = x*y\n"
        "r_squared = 1\n"
        "variant = full\n"
        "alpha = 0\n"
        "lambda_schedule = 1e-1, 1e-2\n"
        "resolution = 256\n"
        "seed = 1\n"
        "output_dir = out/test\n");
}

}  // namespace

TEST_CASE("config parsing and validation", "[cli]") {
    JobConfig cfg = small_cross_config();
    REQUIRE(cfg.f_expr == "x*y");
    REQUIRE(cfg.r_squared == Rational(1));
    REQUIRE(cfg.lambda_schedule.size() == 2);
    REQUIRE(cfg.alpha_start() == Rational(0));

    REQUIRE_THROWS_AS(parse_config_text("f = x*y\nresolution = 10\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("f = x*y\nlambda_schedule = 1e-2, 1e-1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("f = x*y\nr_squared = -1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("f = x*y\nvariant = both\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("nonsense line\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text("f = x*y\nalpha = 3/2\n"), ConfigError);

    // Hash covers every semantic field.
    JobConfig other = small_cross_config();
    other.seed = 2;
    REQUIRE(cfg.content_hash() != other.content_hash());
}

TEST_CASE("analyze stage reports hypothesis failures", "[cli]") {
    JobConfig cfg = small_cross_config();
    cfg.f_expr = "x^2 + y^2 - 1";
    AnalyzeResult analyze = run_analyze(cfg);
    REQUIRE_FALSE(analyze.hypotheses.h4_ok);
    REQUIRE_FALSE(analyze.hypotheses_ok);
}

TEST_CASE("verify pipeline end to end on the cross", "[cli]") {
    JobConfig cfg = small_cross_config();
    VerifyResult v = run_verify(cfg);
    REQUIRE(v.exit_code == kExitOk);
    REQUIRE(v.build.identity_ok);
    REQUIRE(v.regularity_ok);
    REQUIRE(v.schedule.hausdorff_strictly_decreasing);
    REQUIRE(v.trace_components == 1);
    REQUIRE(v.counts_agree);
    REQUIRE(v.distinct_cycles == 1);
    REQUIRE(v.cycle_census_ok);
    REQUIRE(v.probes_ok);

    Json report = verify_report_json(v);
    REQUIRE(report["verdicts"]["connected_limit_set"].get<bool>());
    REQUIRE(report["exit_code"].get<int>() == 0);
}

TEST_CASE("verify reports are byte identical across runs", "[cli]") {
    JobConfig cfg = small_cross_config();
    std::string a = verify_report_json(run_verify(cfg)).dump(2);
    std::string b = verify_report_json(run_verify(cfg)).dump(2);
    REQUIRE(a == b);
}

TEST_CASE("family json round trip", "[cli]") {
    JobConfig cfg = small_cross_config();
    AnalyzeResult analyze = run_analyze(cfg);
    FamilySpec spec = build_family(analyze, cfg, Rational(0));
    FamilySpec back = family_from_json(family_to_json(spec));
    REQUIRE(back.H == spec.H);
    REQUIRE(back.P == spec.P);
    REQUIRE(back.Q == spec.Q);
    REQUIRE(back.alpha == spec.alpha);
    REQUIRE(back.r2 == spec.r2);
    REQUIRE(back.ledger.degree_field == spec.ledger.degree_field);
}

TEST_CASE("transcript mentions the construction pieces", "[cli]") {
    JobConfig cfg = small_cross_config();
    AnalyzeResult analyze = run_analyze(cfg);
    FamilySpec spec = build_family(analyze, cfg, Rational(0));
    std::string t = construction_transcript(analyze, spec);
    REQUIRE(t.find("H(x,y,lambda)") != std::string::npos);
    REQUIRE(t.find("support") != std::string::npos);
    REQUIRE(t.find("hypotheses") != std::string::npos);
}
