#pragma once
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "lps/errors.hpp"

namespace lps {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational coefficients. cpp_rational keeps values reduced with a
// positive denominator, which is exactly the invariant we need.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline long double to_long_double(const Rational& q) { return q.convert_to<long double>(); }

inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

// Parses "a" or "a/b" with optional sign. Used for config values and literals.
inline Rational parse_rational(const std::string& text) {
    std::size_t i = 0, n = text.size();
    auto skip_ws = [&] { while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip_ws();
    bool neg = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) neg = (text[i++] == '-');
    std::size_t num_begin = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == num_begin) throw ConfigError("invalid rational literal: '" + text + "'");
    BigInt num(text.substr(num_begin, i - num_begin));
    BigInt den = 1;
    skip_ws();
    if (i < n && text[i] == '/') {
        ++i;
        skip_ws();
        std::size_t den_begin = i;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == den_begin) throw ConfigError("invalid rational literal: '" + text + "'");
        den = BigInt(text.substr(den_begin, i - den_begin));
        if (den == 0) throw ConfigError("zero denominator in '" + text + "'");
    }
    skip_ws();
    if (i != n) throw ConfigError("trailing characters in rational literal: '" + text + "'");
    Rational q(num, den);
    return neg ? Rational(-q) : q;
}

// Continued-fraction rationalization: best p/q with q <= max_den, accepted
// only when |value - p/q| < tol. Returns nullopt otherwise.
inline std::optional<Rational> rationalize(double value, std::uint64_t max_den, double tol) {
    if (!std::isfinite(value)) return std::nullopt;
    double x = value;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // convergents p0/q0, p1/q1
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(x);
        if (fl > 9.0e18 || fl < -9.0e18) break;
        auto a = static_cast<std::int64_t>(fl);
        std::int64_t p2 = a * p1 + p0;
        std::int64_t q2 = a * q1 + q0;
        if (q2 < 0 || static_cast<std::uint64_t>(q2) > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double rem = x - fl;
        if (rem < 1e-18) break;
        x = 1.0 / rem;
    }
    if (q1 == 0) return std::nullopt;
    Rational cand(p1, q1);
    if (std::abs(to_double(cand) - value) < tol) return cand;
    return std::nullopt;
}

}  // namespace lps
