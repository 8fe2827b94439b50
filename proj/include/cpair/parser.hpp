#pragma once

#include "cpair/normal_form.hpp"
#include "cpair/scalar_expr.hpp"

#include <cctype>
#include <string>

namespace cpair {

// Expression grammar (manifests and CLI):
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := rational | 'pi' | ident | 'sin(' lin ')' | 'cos(' lin ')'
//           | factor '^' nat | '(' expr ')' | '-' factor
//   lin    := linear combination of idents with rational coefficients
//             plus a rational multiple of pi
// Rationals are written "a/b" or as integers; no floating point.
class ExprParser {
public:
    ExprParser(std::string text, ChartPtr chart)
        : text_(std::move(text)), chart_(std::move(chart)) {}

    ScalarExpr parse() {
        skip_ws();
        ScalarExpr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw Error("parse error at '" + text_.substr(pos_) + "' in expression '" + text_ + "'");
        return e;
    }

private:
    ScalarExpr parse_expr() {
        ScalarExpr e = parse_term();
        while (true) {
            skip_ws();
            if (consume('+')) {
                e = e + parse_term();
            } else if (consume('-')) {
                e = e - parse_term();
            } else {
                return e;
            }
        }
    }

    ScalarExpr parse_term() {
        ScalarExpr e = parse_factor();
        while (true) {
            skip_ws();
            if (consume('*'))
                e = e * parse_factor();
            else
                return e;
        }
    }

    ScalarExpr parse_factor() {
        skip_ws();
        ScalarExpr base = parse_atom();
        skip_ws();
        while (consume('^')) {
            skip_ws();
            unsigned e = parse_nat();
            base = pow(base, e);
            skip_ws();
        }
        return base;
    }

    ScalarExpr parse_atom() {
        skip_ws();
        if (consume('-')) return -parse_factor();
        if (consume('(')) {
            ScalarExpr e = parse_expr();
            skip_ws();
            expect(')');
            return e;
        }
        if (pos_ < text_.size() && (std::isdigit(peek()))) return parse_rational_atom();
        std::string id = parse_ident();
        if (id.empty()) throw Error("parse error: expected factor in '" + text_ + "'");
        if (id == "pi") return ScalarExpr::pi(chart_);
        if (id == "sin" || id == "cos") {
            skip_ws();
            expect('(');
            LinearArg arg = parse_linear_arg();
            expect(')');
            return id == "sin" ? ScalarExpr::sin_of(chart_, arg)
                               : ScalarExpr::cos_of(chart_, arg);
        }
        int idx = chart_->index_of(id);
        if (idx < 0) throw Error("unknown coordinate symbol '" + id + "'");
        return ScalarExpr::coordinate(chart_, idx);
    }

    // The sin/cos argument is parsed as a general expression and then
    // required to be linear with a pure-pi constant part, which is exactly
    // the class restriction.
    LinearArg parse_linear_arg() {
        std::size_t start = pos_;
        int depth = 1;
        while (pos_ < text_.size() && depth > 0) {
            if (peek() == '(') ++depth;
            if (peek() == ')') --depth;
            if (depth > 0) ++pos_;
        }
        if (depth != 0) throw Error("unbalanced parentheses in '" + text_ + "'");
        std::string inner = text_.substr(start, pos_ - start);
        ScalarExpr e = ExprParser(inner, chart_).parse();
        ScalarExpr n = normalize(e);
        LinearArg arg;
        for (const RealTerm& t : n.normal_form().real_terms()) {
            if (t.trig != RealTerm::Trig::None || t.mono.pi_pow > 1 ||
                (t.mono.pi_pow == 0 && t.mono.powers.empty()) ||
                t.mono.powers.size() > 1 ||
                (t.mono.powers.size() == 1 && (t.mono.powers[0].second != 1 || t.mono.pi_pow != 0)))
                throw Error("sin/cos argument is not linear-with-pi-offset: '" + inner + "'");
            if (t.mono.pi_pow == 1)
                arg.pi_coeff += t.coef;
            else
                arg.add_coord(t.mono.powers[0].first, t.coef);
        }
        return arg;
    }

    ScalarExpr parse_rational_atom() {
        Integer num = parse_integer();
        skip_ws();
        if (consume('/')) {
            skip_ws();
            Integer den = parse_integer();
            if (den == 0) throw Error("zero denominator in expression '" + text_ + "'");
            return ScalarExpr::constant(chart_, Rational(num, den));
        }
        return ScalarExpr::constant(chart_, Rational(num));
    }

    Integer parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(peek())) ++pos_;
        if (pos_ == start) throw Error("parse error: expected integer in '" + text_ + "'");
        if (pos_ < text_.size() && (peek() == '.' || peek() == 'e' || peek() == 'E'))
            throw Error("floating-point literals are not part of the expression class");
        return Integer(text_.substr(start, pos_ - start));
    }

    unsigned parse_nat() {
        Integer n = parse_integer();
        if (n < 0 || n > 64) throw Error("exponent out of range");
        return n.convert_to<unsigned>();
    }

    std::string parse_ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(peek()) || peek() == '_')) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    char peek() const { return text_[pos_]; }
    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!consume(c))
            throw Error(std::string("parse error: expected '") + c + "' in '" + text_ + "'");
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string text_;
    ChartPtr chart_;
    std::size_t pos_ = 0;
};

inline ScalarExpr parse_expr(const std::string& text, const ChartPtr& chart) {
    return ExprParser(text, chart).parse();
}

}  // namespace cpair
