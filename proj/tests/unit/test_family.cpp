#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lps/family.hpp"
#include "lps/parser.hpp"

using namespace lps;

namespace {

std::vector<GluingCoordinate> paper_gluing() {
    std::vector<GluingCoordinate> pts;
    for (auto [x, y] : {std::pair{1.0, 0.5}, {1.0, -0.5}, {-1.0, 0.5}, {-1.0, -0.5}}) {
        GluingCoordinate g;
        g.approx = {x, y};
        g.exact = {Rational(x < 0 ? -1 : 1), Rational(y < 0 ? -1 : 1, 2)};
        pts.push_back(g);
    }
    return pts;
}

Polynomial random_h(std::mt19937_64& rng) {
    Polynomial h;
    for (int t = 0; t < 6; ++t) {
        Monomial m;
        int a = static_cast<int>(rng() % 4);
        int b = static_cast<int>(rng() % (4 - a));
        int c = static_cast<int>(rng() % (4 - a - b));
        m.exp[kVarX] = a;
        m.exp[kVarY] = b;
        m.exp[kVarLambda] = c;
        long long num = static_cast<long long>(rng() % 19) - 9;
        long long den = 1 + static_cast<long long>(rng() % 9);
        h += Polynomial::term(m, Rational(num, den));
    }
    return h;
}

Polynomial random_f(std::mt19937_64& rng) {
    Polynomial f;
    for (int t = 0; t < 5; ++t) {
        Monomial m;
        int a = static_cast<int>(rng() % 5);
        int b = static_cast<int>(rng() % (5 - a));
        m.exp[kVarX] = a;
        m.exp[kVarY] = b;
        long long num = static_cast<long long>(rng() % 9) - 4;
        f += Polynomial::term(m, Rational(num, 1));
    }
    if (f.is_zero()) f = parse_polynomial("x");
    return f;
}

}  // namespace

TEST_CASE("first construction reproduces the reference field", "[family]") {
    FamilySpec spec = make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(0),
                                  Variant::kFull);
    REQUIRE(spec.H == parse_polynomial("x^2*y^2 + lambda*(x^2 + y^2 - 1)"));
    // Twice the reference right-hand side (time rescaling by 2).
    REQUIRE(spec.P == parse_polynomial(
        "2*(lambda*y + y*x^2 + (lambda*(x^2+y^2-1) + x^2*y^2)*(lambda*x + x*y^2))"));
    REQUIRE(spec.Q == parse_polynomial(
        "2*(-lambda*x - x*y^2 + (lambda*(x^2+y^2-1) + x^2*y^2)*(lambda*y + y*x^2))"));
}

TEST_CASE("glued construction matches the closed form", "[family]") {
    Polynomial f = parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)");
    FamilySpec spec = make_family(f, Rational(3), paper_gluing(), Rational(0), Variant::kFull);
    Polynomial want = parse_polynomial(
        "(x*y*(x+1)*(x-1)*(y+1)*(y-1))^2 + lambda*(x^2+y^2-3)"
        "*((x-1)^2+(y-1/2)^2-lambda^2)*((x-1)^2+(y+1/2)^2-lambda^2)"
        "*((x+1)^2+(y-1/2)^2-lambda^2)*((x+1)^2+(y+1/2)^2-lambda^2)");
    REQUIRE(spec.H == want);
}

TEST_CASE("star construction", "[family]") {
    FamilySpec spec = make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(1),
                                  Variant::kStar);
    REQUIRE(spec.H == parse_polynomial("x^2*y^2 + lambda*(x^2 + y^2 - 1) - lambda^2"));
}

TEST_CASE("field construction basics", "[family]") {
    auto [p0, q0] = build_field(Polynomial{Rational(7)});
    REQUIRE(p0.is_zero());
    REQUIRE(q0.is_zero());
    auto [p1, q1] = build_field(parse_polynomial("y"));
    REQUIRE(p1 == parse_polynomial("1"));
    REQUIRE(q1 == parse_polynomial("y"));
}

TEST_CASE("field identity holds for arbitrary H", "[family]") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        Polynomial h = random_h(rng);
        auto [p, q] = build_field(h);
        Polynomial direct = field_identity_residual(h, p, q);
        Polynomial factored = field_identity_residual_factored(h, p, q);
        REQUIRE(direct.is_zero());
        REQUIRE(factored.is_zero());
    }
}

TEST_CASE("identity detects corruption", "[family]") {
    FamilySpec spec = make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(0),
                                  Variant::kFull);
    Polynomial bad_p = spec.P - Polynomial::variable(kVarX);
    REQUIRE_FALSE(field_identity_residual(spec.H, bad_p, spec.Q).is_zero());
    REQUIRE_FALSE(field_identity_residual_factored(spec.H, bad_p, spec.Q).is_zero());
}

TEST_CASE("identity in indeterminate modes on the bundled families", "[family]") {
    FamilySpec one = make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(0),
                                 Variant::kFull);
    REQUIRE(verify_identity(one).ok);

    Polynomial f = parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)");
    FamilySpec two = make_family(f, Rational(3), paper_gluing(), Rational(0), Variant::kFull);
    REQUIRE(verify_identity(two, IdentityMode{true, {}}).ok);
    REQUIRE(verify_identity(two, IdentityMode{true, {0}}).ok);

    FamilySpec star = make_family(f, Rational(3), {}, Rational(1, 2), Variant::kStar);
    REQUIRE(verify_identity(star).ok);
}

TEST_CASE("identity with fully symbolic gluing on random inputs", "[family]") {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 3; ++trial) {
        Polynomial f = random_f(rng);
        int points = static_cast<int>(rng() % 3);  // 0..2 symbolic gluing points
        std::vector<GluingCoordinate> gluing(points);
        for (auto& g : gluing) g.approx = {0.0, 0.0};  // no exact pair: stays symbolic
        FamilySpec spec = make_family(f, Rational(2), gluing, Rational(1, 3), Variant::kFull);
        IdentityMode mode;
        mode.alpha_symbolic = true;
        for (int e = 0; e < points; ++e) mode.symbolic_gluing.push_back(e);
        REQUIRE(verify_identity(spec, mode).ok);
    }
}

TEST_CASE("degree ledger", "[family]") {
    FamilySpec one = make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(0),
                                 Variant::kFull);
    REQUIRE(one.ledger.degree_f == 2);
    REQUIRE(one.ledger.degree_h == 4);
    REQUIRE(one.ledger.degree_field == 7);
    REQUIRE(one.ledger.full_bound == 7);
    REQUIRE(one.ledger.full_bound_ok);

    Polynomial f = parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)");
    FamilySpec two = make_family(f, Rational(3), paper_gluing(), Rational(0), Variant::kFull);
    REQUIRE(two.ledger.degree_h == 12);
    REQUIRE(two.ledger.degree_field == 23);
    REQUIRE(two.ledger.full_bound == 47);
    REQUIRE(two.ledger.full_bound_ok);
    REQUIRE(two.ledger.harnack_ok);

    FamilySpec star2 = make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(1),
                                   Variant::kStar);
    REQUIRE(star2.ledger.star_exact == 7);
    REQUIRE(star2.ledger.star_exact_ok);
    FamilySpec star6 = make_family(f, Rational(3), {}, Rational(1), Variant::kStar);
    REQUIRE(star6.ledger.star_exact == 23);
    REQUIRE(star6.ledger.star_exact_ok);
}

TEST_CASE("field degree law", "[family]") {
    // deg P = deg H + deg H_x and deg Q = deg H + deg H_y whenever H depends
    // on both variables; on the bundled families both reduce to 2*deg H - 1.
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial h = random_h(rng);
        if (h.degree_xy() < 1) continue;
        auto [p, q] = build_field(h);
        Polynomial hx = h.differentiate(kVarX), hy = h.differentiate(kVarY);
        if (!hx.is_zero()) REQUIRE(p.degree_xy() == h.degree_xy() + hx.degree_xy());
        if (!hy.is_zero()) REQUIRE(q.degree_xy() == h.degree_xy() + hy.degree_xy());
    }
    for (const char* expr : {"x*y", "x*y*(x+1)*(x-1)*(y+1)*(y-1)"}) {
        Rational r2 = std::string(expr) == "x*y" ? Rational(1) : Rational(3);
        FamilySpec spec = make_family(parse_polynomial(expr), r2, {}, Rational(0), Variant::kFull);
        REQUIRE(spec.ledger.degree_field == 2 * spec.ledger.degree_h - 1);
    }
}

TEST_CASE("the field vanishes wherever the gradient does", "[family]") {
    // P = H_y + H*H_x and Q = -H_x + H*H_y exactly, so grad H = 0 forces
    // (P, Q) = 0; check the decomposition itself.
    Polynomial f = parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)");
    FamilySpec spec = make_family(f, Rational(3), paper_gluing(), Rational(0), Variant::kFull);
    Polynomial hx = spec.H.differentiate(kVarX), hy = spec.H.differentiate(kVarY);
    REQUIRE(spec.P - spec.H * hx == hy);
    REQUIRE(spec.Q - spec.H * hy == -hx);
}

TEST_CASE("gluing exactification", "[family]") {
    Polynomial f = parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)");
    GluingCoordinate g = exactify_gluing(f, {1.0, 0.5});
    REQUIRE(g.exact);
    REQUIRE(g.exact->first == Rational(1));
    REQUIRE(g.exact->second == Rational(1, 2));

    // Wall point with a dyadic refined coordinate.
    GluingCoordinate w = exactify_gluing(f, {-0.5703125, -1.0});
    REQUIRE(w.exact);
    REQUIRE(w.exact->first == Rational(-73, 128));

    // A point that is not on Z(f) must not be exactified.
    GluingCoordinate off = exactify_gluing(f, {0.5, 0.5});
    REQUIRE_FALSE(off.exact);

    REQUIRE_THROWS_AS(make_family(f, Rational(3), {}, Rational(2), Variant::kFull), Error);
}

TEST_CASE("alpha resampling draws from the fixed lattice", "[family]") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 32; ++k) {
        Rational a = resample_alpha(rng);
        REQUIRE(a > 0);
        REQUIRE(a <= 1);
        REQUIRE(denominator(a) >= 1);
        Rational scaled = a * 1024;
        REQUIRE(denominator(scaled) == 1);
    }
}
