#pragma once
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lps/geometry.hpp"
#include "lps/polynomial.hpp"

namespace lps {

enum class Variant { kFull, kStar };

inline std::string variant_name(Variant v) { return v == Variant::kFull ? "full" : "star"; }

// A gluing coordinate pair: exact rationals when the refined point
// rationalizes (denominators <= 2^16 within 1e-9 and exactly on Z(f)),
// otherwise a float pair kept symbolic in the exact algebra.
struct GluingCoordinate {
    Vec2 approx;
    std::optional<std::pair<Rational, Rational>> exact;
};

struct DegreeLedger {
    int degree_f = 0;       // M
    int edge_count = 0;     // |E|
    int degree_h = 0;       // deg_xy of H
    int degree_field = 0;   // deg_xy of the vector field (max over P, Q)
    long long full_bound = 0;   // 2(M-1)(M-2)+7
    long long star_exact = 0;   // 4M-1
    bool harnack_ok = false;    // |E| fits the degree budget deg h <= max{2M, (M-1)(M-2)+2}
    bool full_bound_ok = true;
    bool star_exact_ok = true;
    bool remark_2m = false;         // deg H <= 2M
    bool remark_mm2_plus2 = false;  // deg H <= (M-1)(M-2)+2
    bool remark_mm2_plus4 = false;  // deg H <= (M-1)(M-2)+4
    bool violated = false;          // a checked bound failed: report as a finding
    std::string note;
};

// The constructed family: H(x, y, lambda) and the field components of
//   X = (H_y + H*H_x, -H_x + H*H_y),
// i.e. the Hamiltonian field of H plus H * grad H.
struct FamilySpec {
    Polynomial f;
    Rational r2;
    Variant variant = Variant::kFull;
    Rational alpha = 0;
    std::vector<GluingCoordinate> gluing;
    Polynomial H, P, Q;
    DegreeLedger ledger;
    double r_hat = 0.0;

    // Numeric values for the symbolic gluing slots (lambda excluded; it is
    // supplied at trace/integration time).
    std::map<int, double> assignments() const {
        std::map<int, double> a;
        for (std::size_t e = 0; e < gluing.size(); ++e) {
            if (!gluing[e].exact) {
                a[gluing_x_var(static_cast<int>(e))] = gluing[e].approx.x;
                a[gluing_y_var(static_cast<int>(e))] = gluing[e].approx.y;
            }
        }
        return a;
    }
};

namespace detail {

inline Polynomial coordinate_poly(const GluingCoordinate& g, int slot, bool want_x, bool symbolic) {
    if (symbolic || !g.exact)
        return Polynomial::variable(want_x ? gluing_x_var(slot) : gluing_y_var(slot));
    return Polynomial{want_x ? g.exact->first : g.exact->second};
}

}  // namespace detail

// H = f^2 + lambda*(x^2 + y^2 - R^2) * prod_e ((x - x_e)^2 + (y - y_e)^2 - lambda^2) - alpha*lambda^4
// (full variant; the empty product is 1). The star variant drops the product
// and subtracts alpha*lambda^2 instead.
inline Polynomial build_H(const Polynomial& f, const Rational& r2,
                          const std::vector<GluingCoordinate>& gluing,
                          const std::optional<Rational>& alpha,  // nullopt -> symbolic
                          Variant variant,
                          const std::vector<bool>& symbolic_gluing = {}) {
    Polynomial x = Polynomial::variable(kVarX);
    Polynomial y = Polynomial::variable(kVarY);
    Polynomial lambda = Polynomial::variable(kVarLambda);
    Polynomial H = f * f;
    Polynomial ring = x * x + y * y - Polynomial{r2};

    if (variant == Variant::kFull) {
        Polynomial prod{Rational(1)};
        for (std::size_t e = 0; e < gluing.size(); ++e) {
            bool symbolic = e < symbolic_gluing.size() && symbolic_gluing[e];
            Polynomial xe = detail::coordinate_poly(gluing[e], static_cast<int>(e), true, symbolic);
            Polynomial ye = detail::coordinate_poly(gluing[e], static_cast<int>(e), false, symbolic);
            Polynomial dx = x - xe, dy = y - ye;
            prod = prod * (dx * dx + dy * dy - lambda * lambda);
        }
        H += lambda * ring * prod;
        Polynomial a = alpha ? Polynomial{*alpha} : Polynomial::variable(kVarAlpha);
        H -= a * lambda.pow(4);
    } else {
        H += lambda * ring;
        Polynomial a = alpha ? Polynomial{*alpha} : Polynomial::variable(kVarAlpha);
        H -= a * lambda.pow(2);
    }
    return H;
}

// P = H_y + H*H_x, Q = -H_x + H*H_y. The sign convention takes the
// Hamiltonian part as (H_y, -H_x).
inline std::pair<Polynomial, Polynomial> build_field(const Polynomial& H) {
    Polynomial hx = H.differentiate(kVarX);
    Polynomial hy = H.differentiate(kVarY);
    return {hy + H * hx, -hx + H * hy};
}

// Direct route: the orbital derivative of H along the field minus its
// closed form, P*H_x + Q*H_y - H*(H_x^2 + H_y^2). Zero iff the field
// satisfies X(H) = H*|grad H|^2.
inline Polynomial field_identity_residual(const Polynomial& H, const Polynomial& P,
                                          const Polynomial& Q) {
    Polynomial hx = H.differentiate(kVarX);
    Polynomial hy = H.differentiate(kVarY);
    return P * hx + Q * hy - H * (hx * hx + hy * hy);
}

// Exact rearrangement by distributivity: (P - H*H_x)*H_x + (Q - H*H_y)*H_y.
// Same polynomial, far fewer partial products when P and Q carry the
// construction's H*grad H part (the differences collapse to H_y and -H_x).
inline Polynomial field_identity_residual_factored(const Polynomial& H, const Polynomial& P,
                                                   const Polynomial& Q) {
    Polynomial hx = H.differentiate(kVarX);
    Polynomial hy = H.differentiate(kVarY);
    return (P - H * hx) * hx + (Q - H * hy) * hy;
}

struct IdentityMode {
    bool alpha_symbolic = true;
    std::vector<int> symbolic_gluing;  // indices into FamilySpec::gluing
};

struct IdentityResult {
    bool ok = false;
    std::size_t residual_terms = 0;
    bool direct_route = false;    // the literal product formula was computed
    bool factored_route = false;  // the distributivity rearrangement was computed
};

// Rebuilds H under the requested indeterminates, rebuilds the field from it,
// and tests the residual for exact vanishing. Small cases run both routes
// and require them to agree; large cases run the factored route only.
inline IdentityResult verify_identity(const FamilySpec& spec, const IdentityMode& mode = {}) {
    std::vector<bool> symbolic(spec.gluing.size(), false);
    for (int e : mode.symbolic_gluing)
        if (e >= 0 && static_cast<std::size_t>(e) < symbolic.size()) symbolic[e] = true;

    Polynomial H = build_H(spec.f, spec.r2, spec.gluing,
                           mode.alpha_symbolic ? std::nullopt : std::optional<Rational>(spec.alpha),
                           spec.variant, symbolic);
    auto [P, Q] = build_field(H);

    IdentityResult res;
    Polynomial residual = field_identity_residual_factored(H, P, Q);
    res.factored_route = true;
    res.residual_terms = residual.term_count();
    res.ok = residual.is_zero();

    // The literal formula is affordable when the operand sizes are modest;
    // computing it cross-checks the rearranged route.
    std::size_t cost = P.term_count() * std::max<std::size_t>(1, H.term_count());
    if (cost <= 4'000'000) {
        Polynomial direct = field_identity_residual(H, P, Q);
        res.direct_route = true;
        if (direct != residual) res.ok = false;
    }
    return res;
}

// Degree bookkeeping for the constructed field against the stated bounds.
inline DegreeLedger check_degree_bound(const Polynomial& f, const FamilySpec& spec) {
    DegreeLedger led;
    led.degree_f = std::max(0, f.degree_xy());
    led.edge_count = static_cast<int>(spec.gluing.size());
    led.degree_h = spec.H.degree_xy();
    led.degree_field = std::max(spec.P.degree_xy(), spec.Q.degree_xy());
    const long long m = led.degree_f;
    led.full_bound = 2 * (m - 1) * (m - 2) + 7;
    led.star_exact = 4 * m - 1;

    long long remark_budget = std::max(2 * m, (m - 1) * (m - 2) + 2);
    led.harnack_ok = 2LL * led.edge_count + 4 <= remark_budget;
    led.remark_2m = led.degree_h <= 2 * m;
    led.remark_mm2_plus2 = led.degree_h <= (m - 1) * (m - 2) + 2;
    led.remark_mm2_plus4 = led.degree_h <= (m - 1) * (m - 2) + 4;

    if (spec.variant == Variant::kFull) {
        led.full_bound_ok = !led.harnack_ok || led.degree_field <= led.full_bound;
        if (!led.full_bound_ok) {
            led.violated = true;
            led.note = "field degree " + std::to_string(led.degree_field) + " exceeds the bound " +
                       std::to_string(led.full_bound);
        }
    } else {
        led.star_exact_ok = led.degree_field == led.star_exact;
        if (!led.star_exact_ok) {
            led.violated = true;
            led.note = "star-variant field degree " + std::to_string(led.degree_field) +
                       " differs from 4M-1 = " + std::to_string(led.star_exact);
        }
    }
    return led;
}

// Attempts to replace a refined float gluing point by exact rationals:
// both coordinates must round to denominators <= 2^16 within 1e-9 and the
// rounded point must satisfy f = 0 up to the residual tolerance, evaluated
// in exact arithmetic.
inline GluingCoordinate exactify_gluing(const Polynomial& f, const Vec2& p) {
    GluingCoordinate g;
    g.approx = p;
    auto rx = rationalize(p.x, 1u << 16, 1e-9);
    auto ry = rationalize(p.y, 1u << 16, 1e-9);
    if (rx && ry) {
        Polynomial value = f.substitute(kVarX, *rx).substitute(kVarY, *ry);
        Rational v = value.is_zero() ? Rational(0) : value.terms().begin()->second;
        Rational tol(BigInt(1), BigInt("1000000000000"));
        if ((v < 0 ? Rational(-v) : v) < tol) g.exact = {*rx, *ry};
    }
    return g;
}

// Assembles the numeric family for (f, R^2) with the given gluing points and
// a fixed rational alpha in [0, 1].
inline FamilySpec make_family(const Polynomial& f, const Rational& r2,
                              const std::vector<GluingCoordinate>& gluing, const Rational& alpha,
                              Variant variant) {
    if (alpha < 0 || alpha > 1) throw Error("alpha must lie in [0, 1]");
    if (r2 <= 0) throw Error("R^2 must be positive");
    FamilySpec spec;
    spec.f = f;
    spec.r2 = r2;
    spec.variant = variant;
    spec.alpha = alpha;
    spec.gluing = gluing;
    spec.r_hat = std::ceil(std::sqrt(to_double(r2)));
    spec.H = build_H(f, r2, gluing, alpha, variant);
    auto [P, Q] = build_field(spec.H);
    spec.P = std::move(P);
    spec.Q = std::move(Q);
    spec.ledger = check_degree_bound(f, spec);
    return spec;
}

// The alpha-resampling policy: uniform draw from {k/1024 : k = 1..1024}.
inline Rational resample_alpha(std::mt19937_64& rng) {
    auto k = static_cast<long long>(rng() % 1024) + 1;
    return Rational(k, 1024);
}

}  // namespace lps
