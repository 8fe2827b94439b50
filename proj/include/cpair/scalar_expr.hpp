#pragma once

#include "cpair/chart.hpp"
#include "cpair/rational.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cpair {

/// Argument of a sin/cos node: a linear combination of coordinates with
/// rational coefficients plus a rational multiple of pi. The class of
/// expressions is closed under d, wedge, interior product and pullback
/// along the chart maps accepted by this library precisely because trig
/// arguments never leave this shape.
struct LinearArg {
    std::map<int, Rational> coords;  // coordinate index -> coefficient, no zeros
    Rational pi_coeff{0};

    void add_coord(int idx, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = coords.emplace(idx, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) coords.erase(it);
        }
    }
    bool constant() const { return coords.empty(); }
    bool zero() const { return coords.empty() && pi_coeff == 0; }

    LinearArg scaled(const Rational& s) const {
        LinearArg r;
        if (s == 0) return r;
        for (const auto& [i, c] : coords) r.coords.emplace(i, c * s);
        r.pi_coeff = pi_coeff * s;
        return r;
    }
    LinearArg plus(const LinearArg& o) const {
        LinearArg r = *this;
        for (const auto& [i, c] : o.coords) r.add_coord(i, c);
        r.pi_coeff += o.pi_coeff;
        return r;
    }
    double evaluate(const Point& p) const {
        double v = to_double(pi_coeff) * std::numbers::pi;
        for (const auto& [i, c] : coords) v += to_double(c) * p[i];
        return v;
    }
    bool operator==(const LinearArg& o) const {
        return coords == o.coords && pi_coeff == o.pi_coeff;
    }
};

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Constant, Pi, Coordinate, Sum, Product, Power, Sin, Cos };

    Kind kind;
    Rational value;                 // Constant
    int coord = -1;                 // Coordinate
    std::vector<NodePtr> children;  // Sum, Product, Power (single child)
    unsigned exponent = 0;          // Power, >= 0
    LinearArg arg;                  // Sin, Cos
};

namespace detail {
// Memoization slot for the normal form; filled once, thread-safe. The value
// is type-erased so this header need not see the NormalForm definition.
struct NormalFormBox {
    std::once_flag once;
    std::shared_ptr<const void> value;
};
}  // namespace detail

class NormalForm;  // defined in normal_form.hpp

/// An exact symbolic scalar over a chart: rationals, pi, coordinates, sums,
/// products, integer powers, and sin/cos of LinearArg. Immutable value type;
/// every operation is pure, so concurrent use needs no coordination.
class ScalarExpr {
public:
    ScalarExpr() = default;

    static ScalarExpr constant(ChartPtr chart, Rational q) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Constant;
        n->value = std::move(q);
        return ScalarExpr(std::move(chart), std::move(n));
    }
    static ScalarExpr pi(ChartPtr chart) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Pi;
        return ScalarExpr(std::move(chart), std::move(n));
    }
    static ScalarExpr coordinate(ChartPtr chart, int idx) {
        if (idx < 0 || idx >= chart->dimension())
            throw Error("ScalarExpr::coordinate: index out of range");
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Coordinate;
        n->coord = idx;
        return ScalarExpr(std::move(chart), std::move(n));
    }
    static ScalarExpr coordinate(const ChartPtr& chart, const std::string& name) {
        int idx = chart->index_of(name);
        if (idx < 0) throw Error("unknown coordinate symbol '" + name + "'");
        return coordinate(chart, idx);
    }
    static ScalarExpr sin_of(ChartPtr chart, LinearArg a) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Sin;
        n->arg = std::move(a);
        return ScalarExpr(std::move(chart), std::move(n));
    }
    static ScalarExpr cos_of(ChartPtr chart, LinearArg a) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Cos;
        n->arg = std::move(a);
        return ScalarExpr(std::move(chart), std::move(n));
    }

    const ChartPtr& chart() const { return chart_; }
    const NodePtr& root() const { return root_; }
    bool empty() const { return !root_; }

    // The normal form is memoized; see normal_form.hpp.
    const NormalForm& normal_form() const;

    ScalarExpr operator+(const ScalarExpr& o) const { return combine(o, ExprNode::Kind::Sum); }
    ScalarExpr operator-(const ScalarExpr& o) const { return *this + (-o); }
    ScalarExpr operator*(const ScalarExpr& o) const {
        return combine(o, ExprNode::Kind::Product);
    }
    ScalarExpr operator-() const {
        return constant(chart_, Rational(-1)) * (*this);
    }
    ScalarExpr operator*(const Rational& s) const { return constant(chart_, s) * (*this); }

    friend ScalarExpr pow(const ScalarExpr& base, unsigned e) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Power;
        n->children = {base.root_};
        n->exponent = e;
        return ScalarExpr(base.chart_, std::move(n));
    }

    /// Partial derivative with respect to the named coordinate.
    ScalarExpr differentiate(const std::string& coord_name) const {
        int idx = chart_->index_of(coord_name);
        if (idx < 0) throw Error("unknown coordinate symbol '" + coord_name + "'");
        return differentiate(idx);
    }
    ScalarExpr differentiate(int coord) const {
        if (coord < 0 || coord >= chart_->dimension())
            throw Error("differentiate: coordinate index out of range");
        return ScalarExpr(chart_, diff_node(root_, coord));
    }

    double evaluate(const Point& p) const {
        require_same_chart(chart_, p.chart(), "evaluate");
        return eval_node(root_, p);
    }

    /// Substitutes an expression (all on a common target chart) for each
    /// coordinate of this expression's chart. Throws when a trig argument
    /// would leave the class (non-affine substitute inside sin/cos, or an
    /// affine substitute with a non-pi constant part).
    ScalarExpr substitute(const std::vector<ScalarExpr>& repl, const ChartPtr& target) const {
        if (static_cast<int>(repl.size()) != chart_->dimension())
            throw Error("substitute: replacement count != chart dimension");
        for (const auto& r : repl) require_same_chart(r.chart(), target, "substitute");
        return ScalarExpr(target, subst_node(root_, repl, target));
    }

    std::string to_string() const { return print_node(root_, 0); }

    /// Affine decomposition c0 + (linear coordinate part + pi part), when the
    /// tree is syntactically affine. Used to validate chart maps and curves.
    struct AffineParts {
        LinearArg linear;
        Rational constant{0};
    };
    std::optional<AffineParts> affine_parts() const {
        auto v = affine_view(root_);
        if (!v) return std::nullopt;
        return AffineParts{v->lin, v->c0};
    }

private:
    ScalarExpr(ChartPtr chart, NodePtr root)
        : chart_(std::move(chart)),
          root_(std::move(root)),
          nf_box_(std::make_shared<detail::NormalFormBox>()) {}

    ScalarExpr combine(const ScalarExpr& o, ExprNode::Kind k) const {
        require_same_chart(chart_, o.chart_, "ScalarExpr arithmetic");
        auto n = std::make_shared<ExprNode>();
        n->kind = k;
        // Flatten nested sums/products to keep trees shallow.
        for (const NodePtr& c : {root_, o.root_}) {
            if (c->kind == k)
                n->children.insert(n->children.end(), c->children.begin(), c->children.end());
            else
                n->children.push_back(c);
        }
        return ScalarExpr(chart_, std::move(n));
    }

    static NodePtr make_const(Rational q) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Constant;
        n->value = std::move(q);
        return n;
    }

    static NodePtr diff_node(const NodePtr& n, int x) {
        using K = ExprNode::Kind;
        switch (n->kind) {
            case K::Constant:
            case K::Pi:
                return make_const(Rational(0));
            case K::Coordinate:
                return make_const(n->coord == x ? Rational(1) : Rational(0));
            case K::Sum: {
                auto r = std::make_shared<ExprNode>();
                r->kind = K::Sum;
                for (const auto& c : n->children) r->children.push_back(diff_node(c, x));
                return r;
            }
            case K::Product: {
                auto sum = std::make_shared<ExprNode>();
                sum->kind = K::Sum;
                for (std::size_t i = 0; i < n->children.size(); ++i) {
                    auto prod = std::make_shared<ExprNode>();
                    prod->kind = K::Product;
                    for (std::size_t j = 0; j < n->children.size(); ++j)
                        prod->children.push_back(j == i ? diff_node(n->children[j], x)
                                                        : n->children[j]);
                    sum->children.push_back(prod);
                }
                if (sum->children.empty()) return make_const(Rational(0));
                return sum;
            }
            case K::Power: {
                if (n->exponent == 0) return make_const(Rational(0));
                auto prod = std::make_shared<ExprNode>();
                prod->kind = K::Product;
                prod->children.push_back(make_const(Rational(n->exponent)));
                if (n->exponent >= 2) {
                    auto pw = std::make_shared<ExprNode>();
                    pw->kind = K::Power;
                    pw->children = n->children;
                    pw->exponent = n->exponent - 1;
                    prod->children.push_back(pw);
                }
                prod->children.push_back(diff_node(n->children[0], x));
                return prod;
            }
            case K::Sin: {
                auto it = n->arg.coords.find(x);
                if (it == n->arg.coords.end()) return make_const(Rational(0));
                auto cosn = std::make_shared<ExprNode>();
                cosn->kind = K::Cos;
                cosn->arg = n->arg;
                auto prod = std::make_shared<ExprNode>();
                prod->kind = K::Product;
                prod->children = {make_const(it->second), cosn};
                return prod;
            }
            case K::Cos: {
                auto it = n->arg.coords.find(x);
                if (it == n->arg.coords.end()) return make_const(Rational(0));
                auto sinn = std::make_shared<ExprNode>();
                sinn->kind = K::Sin;
                sinn->arg = n->arg;
                auto prod = std::make_shared<ExprNode>();
                prod->kind = K::Product;
                prod->children = {make_const(-it->second), sinn};
                return prod;
            }
        }
        throw Error("diff_node: unreachable");
    }

    static double eval_node(const NodePtr& n, const Point& p) {
        using K = ExprNode::Kind;
        switch (n->kind) {
            case K::Constant: return to_double(n->value);
            case K::Pi: return std::numbers::pi;
            case K::Coordinate: return p[n->coord];
            case K::Sum: {
                double s = 0;
                for (const auto& c : n->children) s += eval_node(c, p);
                return s;
            }
            case K::Product: {
                double s = 1;
                for (const auto& c : n->children) s *= eval_node(c, p);
                return s;
            }
            case K::Power: return std::pow(eval_node(n->children[0], p), double(n->exponent));
            case K::Sin: return std::sin(n->arg.evaluate(p));
            case K::Cos: return std::cos(n->arg.evaluate(p));
        }
        throw Error("eval_node: unreachable");
    }

    // Affine view of a node: c0 + pi-part + linear coordinate part. Empty when
    // the node is not affine. Used to substitute inside trig arguments.
    struct Affine {
        LinearArg lin;
        Rational c0{0};
    };
    static std::optional<Affine> affine_view(const NodePtr& n) {
        using K = ExprNode::Kind;
        switch (n->kind) {
            case K::Constant: return Affine{LinearArg{}, n->value};
            case K::Pi: {
                Affine a;
                a.lin.pi_coeff = 1;
                return a;
            }
            case K::Coordinate: {
                Affine a;
                a.lin.add_coord(n->coord, Rational(1));
                return a;
            }
            case K::Sum: {
                Affine acc;
                for (const auto& c : n->children) {
                    auto v = affine_view(c);
                    if (!v) return std::nullopt;
                    acc.lin = acc.lin.plus(v->lin);
                    acc.c0 += v->c0;
                }
                return acc;
            }
            case K::Product: {
                // Affine only when at most one factor is non-constant.
                Rational scale(1);
                std::optional<Affine> var;
                for (const auto& c : n->children) {
                    auto v = affine_view(c);
                    if (!v) return std::nullopt;
                    bool is_const = v->lin.coords.empty() && v->lin.pi_coeff == 0;
                    if (is_const) {
                        scale *= v->c0;
                    } else if (!var) {
                        var = v;
                    } else {
                        return std::nullopt;
                    }
                }
                if (!var) return Affine{LinearArg{}, scale};
                Affine r;
                r.lin = var->lin.scaled(scale);
                r.c0 = var->c0 * scale;
                return r;
            }
            case K::Power: {
                if (n->exponent == 0) return Affine{LinearArg{}, Rational(1)};
                if (n->exponent == 1) return affine_view(n->children[0]);
                auto v = affine_view(n->children[0]);
                if (v && v->lin.coords.empty() && v->lin.pi_coeff == 0) {
                    Rational c(1);
                    for (unsigned i = 0; i < n->exponent; ++i) c *= v->c0;
                    return Affine{LinearArg{}, c};
                }
                return std::nullopt;
            }
            default: return std::nullopt;
        }
    }

    static NodePtr subst_node(const NodePtr& n, const std::vector<ScalarExpr>& repl,
                              const ChartPtr& target) {
        using K = ExprNode::Kind;
        switch (n->kind) {
            case K::Constant:
            case K::Pi: {
                auto r = std::make_shared<ExprNode>(*n);
                return r;
            }
            case K::Coordinate: return repl[n->coord].root();
            case K::Sum:
            case K::Product: {
                auto r = std::make_shared<ExprNode>();
                r->kind = n->kind;
                for (const auto& c : n->children) r->children.push_back(subst_node(c, repl, target));
                return r;
            }
            case K::Power: {
                auto r = std::make_shared<ExprNode>();
                r->kind = K::Power;
                r->exponent = n->exponent;
                r->children = {subst_node(n->children[0], repl, target)};
                return r;
            }
            case K::Sin:
            case K::Cos: {
                LinearArg out;
                out.pi_coeff = n->arg.pi_coeff;
                for (const auto& [idx, coeff] : n->arg.coords) {
                    auto v = affine_view(repl[idx].root());
                    if (!v)
                        throw Error("substitution leaves expression class: non-affine "
                                    "replacement for coordinate inside sin/cos");
                    if (v->c0 != 0)
                        throw Error("substitution leaves expression class: non-pi constant "
                                    "offset inside sin/cos argument");
                    out = out.plus(v->lin.scaled(coeff));
                }
                auto r = std::make_shared<ExprNode>();
                r->kind = n->kind;
                r->arg = std::move(out);
                return r;
            }
        }
        throw Error("subst_node: unreachable");
    }

    std::string print_lin(const LinearArg& a) const {
        std::ostringstream os;
        bool first = true;
        auto emit = [&](const Rational& c, const std::string& sym) {
            Rational ab = c < 0 ? Rational(-c) : c;
            if (first) {
                if (c < 0) os << "-";
                first = false;
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            if (ab != 1) os << cpair::to_string(ab) << "*";
            os << sym;
        };
        for (const auto& [i, c] : a.coords) emit(c, chart_->name(i));
        if (a.pi_coeff != 0) emit(a.pi_coeff, "pi");
        if (first) os << "0";
        return os.str();
    }

    // prec: 0 sum context, 1 product context, 2 power/unary context
    std::string print_node(const NodePtr& n, int prec) const {
        using K = ExprNode::Kind;
        switch (n->kind) {
            case K::Constant: {
                std::string s = cpair::to_string(n->value);
                if ((n->value < 0 || !is_integer(n->value)) && prec >= 2) return "(" + s + ")";
                if (n->value < 0 && prec >= 1) return "(" + s + ")";
                return s;
            }
            case K::Pi: return "pi";
            case K::Coordinate: return chart_->name(n->coord);
            case K::Sum: {
                std::ostringstream os;
                for (std::size_t i = 0; i < n->children.size(); ++i) {
                    std::string part = print_node(n->children[i], 0);
                    if (i == 0) {
                        os << part;
                    } else if (!part.empty() && part[0] == '-') {
                        os << " - " << part.substr(1);
                    } else {
                        os << " + " << part;
                    }
                }
                std::string s = os.str();
                if (n->children.empty()) s = "0";
                return prec >= 1 ? "(" + s + ")" : s;
            }
            case K::Product: {
                std::size_t start = 0;
                std::string prefix;
                if (n->children.size() > 1 && n->children[0]->kind == K::Constant) {
                    if (n->children[0]->value == 1)
                        start = 1;
                    else if (n->children[0]->value == -1) {
                        start = 1;
                        prefix = "-";
                    }
                }
                std::ostringstream os;
                for (std::size_t i = start; i < n->children.size(); ++i) {
                    if (i > start) os << "*";
                    os << print_node(n->children[i], 1);
                }
                std::string s = prefix + os.str();
                if (n->children.empty()) s = "1";
                bool need_parens = prec >= 2 || (prec >= 1 && !prefix.empty());
                return need_parens ? "(" + s + ")" : s;
            }
            case K::Power:
                return print_node(n->children[0], 2) + "^" + std::to_string(n->exponent);
            case K::Sin: return "sin(" + print_lin(n->arg) + ")";
            case K::Cos: return "cos(" + print_lin(n->arg) + ")";
        }
        throw Error("print_node: unreachable");
    }

    ChartPtr chart_;
    NodePtr root_;
    mutable std::shared_ptr<detail::NormalFormBox> nf_box_;

    friend class NormalForm;
};

}  // namespace cpair
