#pragma once

#include "cpair/differential_form.hpp"
#include "cpair/scalar_expr.hpp"

#include <vector>

namespace cpair {

/// A vector field on a chart, one scalar component per coordinate.
class VectorField {
public:
    VectorField(ChartPtr chart, std::vector<ScalarExpr> components)
        : chart_(std::move(chart)), components_(std::move(components)) {
        if (static_cast<int>(components_.size()) != chart_->dimension())
            throw Error("VectorField: component count != chart dimension");
        for (const auto& c : components_)
            require_same_chart(c.chart(), chart_, "VectorField");
    }

    static VectorField zero(const ChartPtr& chart) {
        std::vector<ScalarExpr> c(chart->dimension(),
                                  ScalarExpr::constant(chart, Rational(0)));
        return VectorField(chart, std::move(c));
    }
    /// The coordinate field d/dx_i.
    static VectorField basis(const ChartPtr& chart, int i) {
        VectorField r = zero(chart);
        r.components_.at(i) = ScalarExpr::constant(chart, Rational(1));
        return r;
    }

    const ChartPtr& chart() const { return chart_; }
    const ScalarExpr& component(int i) const { return components_.at(i); }
    const std::vector<ScalarExpr>& components() const { return components_; }

    VectorField operator+(const VectorField& o) const {
        require_same_chart(chart_, o.chart_, "vector field addition");
        std::vector<ScalarExpr> c;
        for (int i = 0; i < chart_->dimension(); ++i)
            c.push_back(components_[i] + o.components_[i]);
        return VectorField(chart_, std::move(c));
    }
    VectorField operator-() const {
        std::vector<ScalarExpr> c;
        for (const auto& x : components_) c.push_back(-x);
        return VectorField(chart_, std::move(c));
    }
    VectorField operator-(const VectorField& o) const { return *this + (-o); }
    VectorField operator*(const ScalarExpr& f) const {
        std::vector<ScalarExpr> c;
        for (const auto& x : components_) c.push_back(x * f);
        return VectorField(chart_, std::move(c));
    }

    /// Directional derivative X.f.
    ScalarExpr apply(const ScalarExpr& f) const {
        require_same_chart(chart_, f.chart(), "VectorField::apply");
        ScalarExpr r = ScalarExpr::constant(chart_, Rational(0));
        for (int i = 0; i < chart_->dimension(); ++i)
            r = r + components_[i] * f.differentiate(i);
        return r;
    }

    std::vector<double> evaluate(const Point& p) const {
        std::vector<double> v;
        v.reserve(components_.size());
        for (const auto& c : components_) v.push_back(c.evaluate(p));
        return v;
    }

    bool is_zero_field() const {
        for (const auto& c : components_)
            if (!c.normal_form().is_zero()) return false;
        return true;
    }

    std::string to_string() const {
        std::string s;
        bool any = false;
        for (int i = 0; i < chart_->dimension(); ++i) {
            if (components_[i].normal_form().is_zero()) continue;
            if (any) s += " + ";
            s += "(" + normalize(components_[i]).to_string() + ")*d/d" + chart_->name(i);
            any = true;
        }
        return any ? s : "0";
    }

private:
    ChartPtr chart_;
    std::vector<ScalarExpr> components_;
};

/// Contraction i(X) a; errors on 0-forms.
inline DifferentialForm interior_product(const VectorField& X, const DifferentialForm& a) {
    require_same_chart(X.chart(), a.chart(), "interior_product");
    if (a.degree() == 0) throw Error("interior_product: cannot contract a 0-form");
    std::map<IndexTuple, NormalForm> acc;
    for (const auto& [t, c] : a.coefficients()) {
        for (std::size_t pos = 0; pos < t.size(); ++pos) {
            IndexTuple rest;
            rest.reserve(t.size() - 1);
            for (std::size_t j = 0; j < t.size(); ++j)
                if (j != pos) rest.push_back(t[j]);
            Rational sign = (pos % 2 == 0) ? Rational(1) : Rational(-1);
            NormalForm contrib =
                X.component(t[pos]).normal_form().times(c.normal_form()).scaled(sign);
            auto it = acc.find(rest);
            if (it == acc.end())
                acc.emplace(rest, std::move(contrib));
            else
                it->second = it->second.plus(contrib);
        }
    }
    return DifferentialForm::from_accumulated(a.chart(), a.degree() - 1, std::move(acc));
}

/// [X, Y] = (X.d)Y - (Y.d)X, symbolically.
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    require_same_chart(X.chart(), Y.chart(), "lie_bracket");
    const ChartPtr& chart = X.chart();
    std::vector<ScalarExpr> c;
    for (int j = 0; j < chart->dimension(); ++j)
        c.push_back(X.apply(Y.component(j)) - Y.apply(X.component(j)));
    return VectorField(chart, std::move(c));
}

/// Cartan formula L_X = i(X) d + d i(X); for 0-forms, X.f.
inline DifferentialForm lie_derivative(const VectorField& X, const DifferentialForm& a) {
    require_same_chart(X.chart(), a.chart(), "lie_derivative");
    if (a.degree() == 0) return DifferentialForm::function(X.apply(a.scalar()));
    DifferentialForm term1 = interior_product(X, exterior_derivative(a));
    DifferentialForm term2 = exterior_derivative(interior_product(X, a));
    return term1 + term2;
}

/// a(X) for a 1-form.
inline ScalarExpr pair_form_field(const DifferentialForm& a, const VectorField& X) {
    if (a.degree() != 1) throw Error("pair_form_field: degree must be 1");
    require_same_chart(a.chart(), X.chart(), "pair_form_field");
    ScalarExpr r = ScalarExpr::constant(a.chart(), Rational(0));
    for (const auto& [t, c] : a.coefficients()) r = r + c * X.component(t[0]);
    return r;
}

}  // namespace cpair
