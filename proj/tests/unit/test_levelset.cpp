#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lps/levelset.hpp"
#include "lps/parser.hpp"

using namespace lps;

namespace {

FamilySpec example1() {
    return make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(0), Variant::kFull);
}

FamilySpec example2() {
    std::vector<GluingCoordinate> pts;
    for (auto [x, y] : {std::pair{1.0, 0.5}, {1.0, -0.5}, {-1.0, 0.5}, {-1.0, -0.5}}) {
        GluingCoordinate g;
        g.approx = {x, y};
        g.exact = {Rational(x < 0 ? -1 : 1), Rational(y < 0 ? -1 : 1, 2)};
        pts.push_back(g);
    }
    return make_family(parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)"), Rational(3), pts,
                       Rational(0), Variant::kFull);
}

FamilySpec example3() {
    return make_family(parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)"), Rational(3), {},
                       Rational(0), Variant::kStar);
}

}  // namespace

TEST_CASE("hausdorff basics", "[levelset]") {
    std::vector<Vec2> a{{0, 0}, {1, 1}, {2, 0.5}};
    REQUIRE(hausdorff(a, a) == 0.0);
    REQUIRE(hausdorff({{0, 0}}, {{3, 4}}) == 5.0);
    REQUIRE_THROWS_AS(hausdorff({}, a), EmptyInputError);
    REQUIRE_THROWS_AS(hausdorff_brute(a, {}), EmptyInputError);
}

TEST_CASE("accelerated hausdorff agrees with brute force", "[levelset]") {
    std::mt19937_64 rng(31);
    auto random_set = [&](int n) {
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i) {
            pts.push_back({static_cast<double>(rng() % 1000000) / 50000.0 - 10.0,
                           static_cast<double>(rng() % 1000000) / 50000.0 - 10.0});
        }
        return pts;
    };
    std::vector<Vec2> a = random_set(1000), b = random_set(700);
    REQUIRE(std::abs(hausdorff(a, b) - hausdorff_brute(a, b)) <= 1e-12);
    // Clustered sets stress the bucket pruning.
    std::vector<Vec2> c = random_set(500);
    for (auto& p : c) p = p * 0.01;
    REQUIRE(std::abs(hausdorff(a, c) - hausdorff_brute(a, c)) <= 1e-12);
}

TEST_CASE("rounded cross at lambda 1e-2", "[levelset]") {
    FamilySpec spec = example1();
    LevelSetTrace trace = trace_levelset(spec, 0.01, 256);
    REQUIRE_FALSE(trace.empty_level_set);
    REQUIRE(trace.component_count() == 1);
    REQUIRE(component_count_oracle(spec, 0.01, 256) == 1);

    for (std::size_t pl = 0; pl < trace.curve.polylines.size(); ++pl)
        for (double r : trace.curve.residuals[pl]) REQUIRE(r < trace.residual_tol_used);
    REQUIRE(trace.curve.bounding_radius <= 2.0 * spec.r_hat);
    REQUIRE(trace.min_grad_norm() > 1e-6);
}

TEST_CASE("component counts split by variant", "[levelset]") {
    FamilySpec full = example2(), star = example3();
    LevelSetTrace tf = trace_levelset(full, 1e-3, 512);
    LevelSetTrace ts = trace_levelset(star, 1e-3, 512);
    REQUIRE(tf.component_count() == 1);
    REQUIRE(ts.component_count() == 5);
    REQUIRE(component_count_oracle(full, 1e-3, 512) == 1);
    REQUIRE(component_count_oracle(star, 1e-3, 512) == 5);
}

TEST_CASE("trace is stable under refinement", "[levelset]") {
    FamilySpec spec = example1();
    LevelSetTrace a = trace_levelset(spec, 0.01, 128);
    LevelSetTrace b = trace_levelset(spec, 0.01, 256);
    double d = hausdorff(a.point_set(), b.point_set());
    REQUIRE(d < 4.0 * a.curve.cell);
}

TEST_CASE("schedule rows decrease toward the variety", "[levelset]") {
    FamilySpec spec = example1();
    GammaTrace gamma = extract_gamma(spec.f, spec.r2, 256);
    ScheduleTable table = convergence_schedule(spec, gamma, {1e-1, 1e-2, 1e-3}, 256);
    REQUIRE(table.rows.size() == 3);
    REQUIRE(table.hausdorff_strictly_decreasing);
    REQUIRE(table.component_count_stable);
    REQUIRE(table.rows[0].component_count == 1);
    REQUIRE_THROWS_AS(convergence_schedule(spec, gamma, {1e-2, 1e-1}, 128), Error);
}

TEST_CASE("empty level set is reported, not thrown", "[levelset]") {
    // Zero set far off the lattice with a tube far below cell size.
    Polynomial f = parse_polynomial("(x - 1/3)^2 + y^2 - 1/7");
    FamilySpec spec = make_family(f, Rational(1), {}, Rational(0), Variant::kFull);
    LevelSetTrace trace = trace_levelset(spec, 1e-12, 64);
    REQUIRE(trace.empty_level_set);
    REQUIRE(trace.component_count() == 0);
}

TEST_CASE("regularity check and the constructed stress case", "[levelset]") {
    FamilySpec spec = example1();
    auto [ok, rows] = regularity_check(spec, {1e-1, 1e-2}, 256);
    REQUIRE(ok);
    REQUIRE(rows.size() == 2);

    auto [vacuous, none] = regularity_check(spec, {}, 256);
    REQUIRE(vacuous);
    REQUIRE(none.empty());

    // f = x^2: the gradient on the level set scales like lambda near the top
    // of the oval, so a deep schedule entry dips below the tolerance.
    FamilySpec stress = make_family(parse_polynomial("x^2"), Rational(1), {}, Rational(0),
                                    Variant::kFull);
    auto [sok, srows] = regularity_check(stress, {1e-2, 1e-7}, 512);
    REQUIRE_FALSE(sok);
    REQUIRE(srows[0].ok);
    REQUIRE_FALSE(srows[1].ok);
    REQUIRE(srows[1].min_grad_norm < 1e-6);
}

TEST_CASE("local arc probes", "[levelset]") {
    FamilySpec two = example2();
    for (const auto& g : two.gluing)
        REQUIRE(gluing_probe(two, g.approx, 1e-4, 0.05) == 2);

    // Boundary crossing of Gamma: single connected curve.
    GammaTrace gamma = extract_gamma(two.f, two.r2, 256);
    REQUIRE(!gamma.boundary_points.empty());
    REQUIRE(gluing_probe(two, gamma.boundary_points[0], 1e-4, 0.05) == 1);

    // Near the origin the cross-shaped variety keeps four local branches.
    FamilySpec one = example1();
    REQUIRE(gluing_probe(one, {0, 0}, 1e-2, 0.6) == 4);
}
