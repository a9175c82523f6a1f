#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lps/compiled.hpp"
#include "lps/parser.hpp"
#include "lps/polynomial.hpp"

using namespace lps;

namespace {

// Random sparse polynomial in x, y, lambda with small rational coefficients.
Polynomial random_poly(std::mt19937_64& rng, int max_terms = 4, int max_exp = 3) {
    Polynomial p;
    int terms = 1 + static_cast<int>(rng() % max_terms);
    for (int t = 0; t < terms; ++t) {
        Monomial m;
        m.exp[kVarX] = rng() % (max_exp + 1);
        m.exp[kVarY] = rng() % (max_exp + 1);
        m.exp[kVarLambda] = rng() % 2;
        long long num = static_cast<long long>(rng() % 19) - 9;
        long long den = 1 + static_cast<long long>(rng() % 9);
        p += Polynomial::term(m, Rational(num, den));
    }
    return p;
}

}  // namespace

TEST_CASE("parsing basics", "[poly]") {
    Polynomial xy = parse_polynomial("x*y");
    REQUIRE(xy.term_count() == 1);
    REQUIRE(xy.degree_xy() == 2);

    // Independent term-by-term expansion of x*y*(x+1)*(x-1)*(y+1)*(y-1):
    // (x^2-1)(y^2-1) = x^2 y^2 - x^2 - y^2 + 1, times x*y.
    Polynomial expanded = parse_polynomial("x^3*y^3 - x^3*y - x*y^3 + x*y");
    REQUIRE(parse_polynomial("x*y*(x+1)*(x-1)*(y+1)*(y-1)") == expanded);

    REQUIRE_THROWS_AS(parse_polynomial("x^-1"), ParseError);
    REQUIRE_THROWS_AS(parse_polynomial("x + z"), ParseError);
    REQUIRE_THROWS_AS(parse_polynomial("x + "), ParseError);
    REQUIRE_THROWS_AS(parse_polynomial("(x"), ParseError);

    try {
        parse_polynomial("x^-1");
        FAIL("expected throw");
    } catch (const ParseError& e) {
        REQUIRE(e.position == 2);
    }
}

TEST_CASE("rational literals and printing", "[poly]") {
    REQUIRE(parse_rational("3/4") == Rational(3, 4));
    REQUIRE(parse_rational("-6/8") == Rational(-3, 4));
    REQUIRE(to_string(Rational(-3, 4)) == "-3/4");
    REQUIRE_THROWS_AS(parse_rational("1/0"), ConfigError);

    Polynomial p = parse_polynomial("1/2*x^2 - 3*y + 7/3");
    REQUIRE(p.to_text() == "1/2*x^2 - 3*y + 7/3");
}

TEST_CASE("differentiation", "[poly]") {
    Polynomial p = parse_polynomial("x^2*y^2");
    REQUIRE(p.differentiate(kVarX) == parse_polynomial("2*x*y^2"));
    REQUIRE(Polynomial{Rational(5)}.differentiate(kVarX).is_zero());
    Polynomial xy = parse_polynomial("x*y");
    REQUIRE(xy.differentiate(kVarX) == parse_polynomial("y"));
    REQUIRE(xy.differentiate(kVarY) == parse_polynomial("x"));
}

TEST_CASE("degree and substitution", "[poly]") {
    Polynomial p = parse_polynomial("x^2*y^2 + lambda*(x^2 + y^2 - 1)");
    REQUIRE(p.degree_xy() == 4);
    REQUIRE(p.degree_total() == 4);
    REQUIRE(Polynomial{}.degree_xy() == INT_MIN);

    Polynomial q = parse_polynomial("lambda*(x^2 + y^2 - 1)");
    REQUIRE(q.substitute(kVarLambda, Rational(1, 100)) ==
            parse_polynomial("1/100*(x^2 + y^2 - 1)"));
    REQUIRE(parse_polynomial("(x+y)^2") == parse_polynomial("x^2 + 2*x*y + y^2"));

    Polynomial r = parse_polynomial("x^2 + y");
    REQUIRE(r.substitute(kVarY, parse_polynomial("x^2")) == parse_polynomial("2*x^2"));
}

TEST_CASE("ring axioms and product rule on random instances", "[poly]") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial p = random_poly(rng), q = random_poly(rng), r = random_poly(rng);
        REQUIRE((p + q) * r == p * r + q * r);
        REQUIRE(p * q == q * p);
        REQUIRE((p * q) * r == p * (q * r));
        for (int var : {kVarX, kVarY}) {
            REQUIRE((p * q).differentiate(var) ==
                    p.differentiate(var) * q + p * q.differentiate(var));
        }
    }
}

TEST_CASE("print-parse round trip", "[poly]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Polynomial p = random_poly(rng, 6, 4);
        REQUIRE(parse_polynomial(p.to_text()) == p);
    }
}

TEST_CASE("float evaluation agrees with exact structure", "[poly]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial p = random_poly(rng), q = random_poly(rng);
        double x = (static_cast<double>(rng() % 2000) - 1000) / 997.0;
        double y = (static_cast<double>(rng() % 2000) - 1000) / 997.0;
        double lam = (static_cast<double>(rng() % 1000)) / 1009.0;
        double lhs = (p * q).evaluate(x, y, lam);
        double rhs = p.evaluate(x, y, lam) * q.evaluate(x, y, lam);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-9).epsilon(1e-9));
    }
}

TEST_CASE("compiled evaluator matches term evaluation", "[poly]") {
    Polynomial p = parse_polynomial("x^2*y^2 + lambda*(x^2 + y^2 - 1)");
    CompiledXY c(p, {{kVarLambda, 0.01}});
    for (double x : {-1.5, -0.3, 0.0, 0.7, 1.2}) {
        for (double y : {-1.1, 0.2, 0.9}) {
            REQUIRE(c.eval(x, y) == Catch::Approx(p.evaluate(x, y, 0.01)).margin(1e-14));
        }
    }
}

TEST_CASE("rationalization of refined coordinates", "[poly]") {
    auto r = rationalize(0.5, 1u << 16, 1e-9);
    REQUIRE(r);
    REQUIRE(*r == Rational(1, 2));
    r = rationalize(-0.5703125, 1u << 16, 1e-9);  // -73/128
    REQUIRE(r);
    REQUIRE(*r == Rational(-73, 128));
    REQUIRE_FALSE(rationalize(0.12345678912345, 1u << 16, 1e-9).has_value());
}
