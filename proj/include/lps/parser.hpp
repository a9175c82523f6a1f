#pragma once
#include <cctype>
#include <string>
#include <string_view>

#include "lps/polynomial.hpp"

namespace lps {

// Recursive-descent parser for the expression grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary ('*' unary)*
//   unary  := ('+'|'-') unary | power
//   power  := atom ('^' nonnegative-integer)?
//   atom   := '(' expr ')' | variable | literal
//   literal := integer ('/' integer)?
// Variables: x, y, lambda, alpha, u<k>, v<k>. Multiplication is explicit.
class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Polynomial parse() {
        Polynomial p = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return p;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial parse_expr() {
        Polynomial p = parse_term();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                p += parse_term();
            } else if (c == '-') {
                ++pos_;
                p -= parse_term();
            } else {
                return p;
            }
        }
    }

    Polynomial parse_term() {
        Polynomial p = parse_unary();
        while (consume('*')) p = p * parse_unary();
        return p;
    }

    Polynomial parse_unary() {
        if (consume('-')) return -parse_unary();
        if (consume('+')) return parse_unary();
        return parse_power();
    }

    Polynomial parse_power() {
        Polynomial base = parse_atom();
        if (!consume('^')) return base;
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("exponent must be a non-negative integer");
        unsigned long exp = parse_uint();
        if (exp > 255) fail("exponent too large");
        return base.pow(static_cast<unsigned>(exp));
    }

    Polynomial parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Polynomial p = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_literal();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_variable();
        fail("expected '(', variable, or number");
    }

    unsigned long parse_uint() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::stoul(std::string(text_.substr(begin, pos_ - begin)));
    }

    BigInt parse_bigint() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return BigInt(std::string(text_.substr(begin, pos_ - begin)));
    }

    Polynomial parse_literal() {
        BigInt num = parse_bigint();
        BigInt den = 1;
        // '/' only occurs inside rational literals; there is no division
        // operator in the grammar.
        std::size_t save = pos_;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected denominator digits");
            den = parse_bigint();
            if (den == 0) fail("zero denominator");
        } else {
            pos_ = save;
        }
        return Polynomial{Rational(num, den)};
    }

    Polynomial parse_variable() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(begin, pos_ - begin));
        if (name == "x") return Polynomial::variable(kVarX);
        if (name == "y") return Polynomial::variable(kVarY);
        if (name == "lambda") return Polynomial::variable(kVarLambda);
        if (name == "alpha") return Polynomial::variable(kVarAlpha);
        if ((name[0] == 'u' || name[0] == 'v') && name.size() > 1) {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int e = std::stoi(name.substr(1));
                if (e < kMaxGluingVars)
                    return Polynomial::variable(name[0] == 'u' ? gluing_x_var(e) : gluing_y_var(e));
            }
        }
        pos_ = begin;
        fail("unknown identifier '" + name + "'");
    }
};

inline Polynomial parse_polynomial(std::string_view text) { return ExprParser(text).parse(); }

}  // namespace lps
