#pragma once
#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lps/errors.hpp"
#include "lps/rational.hpp"

namespace lps {

// Variable slots. x, y are the plane coordinates, lambda the family
// parameter. alpha and the gluing coordinates u_e, v_e only carry exponents
// when the caller asks for indeterminate-mode algebra.
constexpr int kMaxVars = 32;
constexpr int kVarX = 0;
constexpr int kVarY = 1;
constexpr int kVarLambda = 2;
constexpr int kVarAlpha = 3;
constexpr int kMaxGluingVars = (kMaxVars - 4) / 2;

constexpr int gluing_x_var(int e) { return 4 + 2 * e; }
constexpr int gluing_y_var(int e) { return 5 + 2 * e; }

inline std::string var_name(int v) {
    switch (v) {
        case kVarX: return "x";
        case kVarY: return "y";
        case kVarLambda: return "lambda";
        case kVarAlpha: return "alpha";
        default: {
            int e = (v - 4) / 2;
            return ((v - 4) % 2 == 0 ? "u" : "v") + std::to_string(e);
        }
    }
}

// Dense exponent tuple over the fixed variable slots.
struct Monomial {
    std::array<std::uint8_t, kMaxVars> exp{};

    int degree_total() const {
        int d = 0;
        for (auto e : exp) d += e;
        return d;
    }
    int degree_xy() const { return exp[kVarX] + exp[kVarY]; }

    bool operator==(const Monomial& o) const { return exp == o.exp; }

    Monomial operator*(const Monomial& o) const {
        Monomial r;
        for (int i = 0; i < kMaxVars; ++i) {
            int s = exp[i] + o.exp[i];
            if (s > 255) throw Error("monomial exponent overflow");
            r.exp[i] = static_cast<std::uint8_t>(s);
        }
        return r;
    }
};

// Graded lexicographic, descending, so map iteration order is the canonical
// print order and begin() is the leading term.
struct GradedLexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.degree_total(), db = b.degree_total();
        if (da != db) return da > db;
        return a.exp > b.exp;
    }
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const {
        std::uint64_t h = 1469598103934665603ull;
        std::uint64_t chunk;
        for (int i = 0; i < kMaxVars; i += 8) {
            std::memcpy(&chunk, m.exp.data() + i, 8);
            h = (h ^ chunk) * 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// Sparse multivariate polynomial with exact rational coefficients.
// Immutable in spirit: all operations return new values.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Rational, GradedLexGreater>;

    Polynomial() = default;
    explicit Polynomial(const Rational& c) {
        if (c != 0) terms_[Monomial{}] = c;
    }
    explicit Polynomial(long long c) : Polynomial(Rational(c)) {}

    static Polynomial variable(int v, int power = 1) {
        Polynomial p;
        if (v < 0 || v >= kMaxVars) throw Error("variable index out of range");
        Monomial m;
        m.exp[v] = static_cast<std::uint8_t>(power);
        p.terms_[m] = 1;
        return p;
    }

    static Polynomial term(const Monomial& m, const Rational& c) {
        Polynomial p;
        if (c != 0) p.terms_[m] = c;
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    // INT_MIN is the -infinity sentinel for the zero polynomial.
    int degree_total() const {
        int d = INT_MIN;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree_total());
        return d;
    }
    int degree_xy() const {
        int d = INT_MIN;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree_xy());
        return d;
    }
    int degree_in(int v) const {
        int d = INT_MIN;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.exp[v]));
        return d;
    }

    bool uses_var(int v) const {
        for (const auto& [m, c] : terms_)
            if (m.exp[v] > 0) return true;
        return false;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) {
        Polynomial r;
        for (const auto& [m, c] : a.terms_) r.terms_[m] = -c;
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial{};
        // Accumulate in a hash map; exact arithmetic makes the result
        // independent of accumulation order.
        std::unordered_map<Monomial, Rational, MonomialHash> acc;
        acc.reserve(a.terms_.size() * 2);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                acc[ma * mb] += ca * cb;
            }
        }
        Polynomial r;
        for (auto& [m, c] : acc) {
            if (c != 0) r.terms_.emplace(m, std::move(c));
        }
        return r;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& p) {
        Polynomial r;
        if (c == 0) return r;
        for (const auto& [m, pc] : p.terms_) r.terms_[m] = c * pc;
        return r;
    }

    Polynomial pow(unsigned n) const {
        Polynomial result{Rational(1)};
        Polynomial base = *this;
        while (n > 0) {
            if (n & 1u) result = result * base;
            base = (n >>= 1) ? base * base : Polynomial{};
        }
        return result;
    }

    // Formal partial derivative; exact.
    Polynomial differentiate(int v) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            if (m.exp[v] == 0) continue;
            Monomial d = m;
            d.exp[v] -= 1;
            r.add_term(d, c * m.exp[v]);
        }
        return r;
    }

    Polynomial substitute(int v, const Rational& value) const {
        Polynomial r;
        std::vector<Rational> powers{Rational(1)};
        for (const auto& [m, c] : terms_) {
            while (powers.size() <= m.exp[v]) powers.push_back(powers.back() * value);
            Monomial d = m;
            d.exp[v] = 0;
            r.add_term(d, c * powers[m.exp[v]]);
        }
        return r;
    }

    Polynomial substitute(int v, const Polynomial& value) const {
        std::vector<Polynomial> powers{Polynomial{Rational(1)}};
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            while (powers.size() <= m.exp[v]) powers.push_back(powers.back() * value);
            Monomial d = m;
            d.exp[v] = 0;
            r += Polynomial::term(d, c) * powers[m.exp[v]];
        }
        return r;
    }

    // float64 evaluation via per-variable power tables; inexact by nature
    // (documented); the exact path is the rational arithmetic above.
    double evaluate_at(const std::array<double, kMaxVars>& vals) const {
        double sum = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = to_double(c);
            for (int v = 0; v < kMaxVars; ++v) {
                for (int k = 0; k < m.exp[v]; ++k) t *= vals[v];
            }
            sum += t;
        }
        return sum;
    }

    double evaluate(double x, double y, double lambda = 0.0) const {
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(lambda))
            throw Error("evaluate: coordinates must be finite");
        std::array<double, kMaxVars> vals{};
        vals[kVarX] = x;
        vals[kVarY] = y;
        vals[kVarLambda] = lambda;
        for (int v = kVarAlpha; v < kMaxVars; ++v) {
            if (uses_var(v)) throw Error("evaluate: polynomial uses variable " + var_name(v));
        }
        return evaluate_at(vals);
    }

    // Canonical text: graded-lex order, explicit '*' and '^'.
    std::string to_text() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational a = c;
            if (first) {
                if (a < 0) {
                    out += "-";
                    a = -a;
                }
                first = false;
            } else {
                if (a < 0) {
                    out += " - ";
                    a = -a;
                } else {
                    out += " + ";
                }
            }
            std::string vars;
            for (int v = 0; v < kMaxVars; ++v) {
                if (m.exp[v] == 0) continue;
                if (!vars.empty()) vars += "*";
                vars += var_name(v);
                if (m.exp[v] > 1) vars += "^" + std::to_string(static_cast<int>(m.exp[v]));
            }
            if (vars.empty()) {
                out += lps::to_string(a);
            } else if (a == 1) {
                out += vars;
            } else {
                out += lps::to_string(a) + "*" + vars;
            }
        }
        return out;
    }

private:
    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TermMap terms_;
};

inline Polynomial gradient_x(const Polynomial& p) { return p.differentiate(kVarX); }
inline Polynomial gradient_y(const Polynomial& p) { return p.differentiate(kVarY); }

}  // namespace lps
