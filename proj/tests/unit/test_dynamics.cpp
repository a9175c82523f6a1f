#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lps/dynamics.hpp"
#include "lps/parser.hpp"

using namespace lps;

namespace {
FamilySpec example1() {
    return make_family(parse_polynomial("x*y"), Rational(1), {}, Rational(0), Variant::kFull);
}
}  // namespace

TEST_CASE("equilibria of the field are the gradient zeros", "[dynamics]") {
    FamilySpec spec = example1();
    CompiledFamily fam(spec, 0.01);
    REQUIRE(fam.field({0, 0}).norm() == 0.0);

    Trajectory t = integrate(fam, {0, 0}, Direction::kForward, 10.0);
    REQUIRE(t.stop == StopReason::kEquilibrium);
    REQUIRE(t.samples.size() == 1);
}

TEST_CASE("orbit monotonicity off the level set", "[dynamics]") {
    FamilySpec spec = example1();
    CompiledFamily fam(spec, 0.01);

    Vec2 outside{0.5, 0.25};  // H > 0
    REQUIRE(static_cast<double>(fam.H.value_ld(outside)) > 1e-6);
    Trajectory forward = integrate(fam, outside, Direction::kForward, 40.0);
    REQUIRE(monotonicity_check(forward));
    REQUIRE(std::abs(forward.samples.back().h_value) >
            std::abs(forward.samples.front().h_value));

    // Inside the level set H is negative; |H| still grows in forward time.
    Vec2 inside{0.05, 0.05};
    REQUIRE(static_cast<double>(fam.H.value_ld(inside)) < -1e-6);
    Trajectory fwd_in = integrate(fam, inside, Direction::kForward, 40.0);
    REQUIRE(monotonicity_check(fwd_in));

    Trajectory backward = integrate(fam, outside, Direction::kBackward, 40.0);
    REQUIRE(monotonicity_check(backward));
    REQUIRE(backward.samples.back().t < 0.0);
    REQUIRE(std::abs(backward.samples.back().h_value) <
            std::abs(backward.samples.front().h_value));
}

TEST_CASE("cycle capture and closure", "[dynamics]") {
    FamilySpec spec = example1();
    CompiledFamily fam(spec, 0.01);
    CycleResult cyc = locate_cycle(fam, {0.5, 0.25});

    REQUIRE(std::abs(static_cast<double>(fam.H.value_ld(cyc.landing))) < 1e-10);
    REQUIRE(cyc.return_displacement < 1e-6 * spec.r_hat);
    REQUIRE(cyc.max_h_on_cycle < 1e-8);
    REQUIRE(cyc.period > 1.0);
    // Repelling from both sides in forward time.
    REQUIRE(cyc.divergence_plus > 1.0);
    REQUIRE(cyc.divergence_minus > 1.0);
}

TEST_CASE("closure displacement is stable under tolerance halving", "[dynamics]") {
    FamilySpec spec = example1();
    CompiledFamily fam(spec, 0.01);
    CycleOptions loose;
    loose.rel_tol = 2e-11;
    loose.abs_tol = 2e-13;
    CycleOptions tight;
    tight.rel_tol = 1e-11;
    tight.abs_tol = 1e-13;
    double d1 = locate_cycle(fam, {0.5, 0.25}, loose).return_displacement;
    double d2 = locate_cycle(fam, {0.5, 0.25}, tight).return_displacement;
    REQUIRE(std::abs(d1 - d2) < 10.0 * tight.rel_tol * 1e3);  // scaled by orbit length
    REQUIRE(d2 < 1e-6);
}

TEST_CASE("seeding at an equilibrium is rejected", "[dynamics]") {
    FamilySpec spec = example1();
    CompiledFamily fam(spec, 0.01);
    REQUIRE_THROWS_AS(locate_cycle(fam, {0, 0}), NoConvergenceToCycleError);
    REQUIRE_THROWS_AS(
        integrate(fam, {std::numeric_limits<double>::quiet_NaN(), 0}, Direction::kForward, 1.0),
        Error);
}

TEST_CASE("monotonicity on random off-cycle seeds", "[dynamics]") {
    FamilySpec spec = example1();
    CompiledFamily fam(spec, 0.01);
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 10) {
        Vec2 p{static_cast<double>(rng() % 2000) / 1000.0 - 1.0,
               static_cast<double>(rng() % 2000) / 1000.0 - 1.0};
        double h = static_cast<double>(fam.H.value_ld(p));
        if (std::abs(h) < 1e-6 || fam.field(p).norm() < 1e-10) continue;
        Trajectory t = integrate(fam, p, Direction::kForward, 5.0);
        REQUIRE(monotonicity_check(t));
        ++checked;
    }
}
