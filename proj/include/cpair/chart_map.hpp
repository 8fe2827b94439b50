#pragma once

#include "cpair/differential_form.hpp"
#include "cpair/vector_field.hpp"

#include <string>
#include <vector>

namespace cpair {

/// A smooth map between charts, one source-chart expression per target
/// coordinate. Pullbacks stay inside the expression class as long as any
/// target coordinate that appears inside a sin/cos has an affine component
/// with a pure-pi constant part; that is checked lazily at pullback time.
/// validate_torus_map() additionally enforces the torus discipline (integer
/// winding in periodic coordinates) for maps declared between tori.
class ChartMap {
public:
    ChartMap(ChartPtr source, ChartPtr target, std::vector<ScalarExpr> components)
        : source_(std::move(source)),
          target_(std::move(target)),
          components_(std::move(components)) {
        if (static_cast<int>(components_.size()) != target_->dimension())
            throw Error("ChartMap: component count != target dimension");
        for (const auto& c : components_)
            require_same_chart(c.chart(), source_, "ChartMap components");
    }

    static ChartMap identity(const ChartPtr& chart) {
        std::vector<ScalarExpr> comps;
        for (int i = 0; i < chart->dimension(); ++i)
            comps.push_back(ScalarExpr::coordinate(chart, i));
        return ChartMap(chart, chart, std::move(comps));
    }

    const ChartPtr& source() const { return source_; }
    const ChartPtr& target() const { return target_; }
    const std::vector<ScalarExpr>& components() const { return components_; }

    /// Composition with evaluation: image of a source point.
    Point apply(const Point& p) const {
        std::vector<double> y;
        y.reserve(components_.size());
        for (const auto& c : components_) y.push_back(c.evaluate(p));
        return Point(target_, std::move(y));
    }

    /// Enforces the class restriction for maps between (partially) periodic
    /// charts: a periodic target coordinate must be affine with integer
    /// coefficients on periodic source coordinates, rational coefficients on
    /// non-periodic ones, and a rational-pi offset.
    void validate_torus_map() const {
        for (int j = 0; j < target_->dimension(); ++j) {
            if (!target_->periodic(j)) continue;
            auto aff = components_[j].affine_parts();
            if (!aff)
                throw Error("map component for periodic coordinate '" + target_->name(j) +
                            "' is not affine");
            if (aff->constant != 0)
                throw Error("map component for periodic coordinate '" + target_->name(j) +
                            "' has a non-pi constant offset");
            for (const auto& [i, c] : aff->linear.coords)
                if (source_->periodic(i) && !is_integer(c))
                    throw Error("map component for periodic coordinate '" + target_->name(j) +
                                "' has non-integer winding in '" + source_->name(i) + "'");
        }
    }

private:
    ChartPtr source_;
    ChartPtr target_;
    std::vector<ScalarExpr> components_;
};

/// Pullback along phi: substitution into coefficients and wedge of the
/// component differentials. The form must live on phi's target chart.
inline DifferentialForm pullback(const ChartMap& phi, const DifferentialForm& a) {
    require_same_chart(a.chart(), phi.target(), "pullback");
    const ChartPtr& src = phi.source();
    if (a.degree() == 0)
        return DifferentialForm::function(a.scalar().substitute(phi.components(), src));

    // Differentials of the map components, as 1-forms on the source chart.
    std::vector<DifferentialForm> dT;
    dT.reserve(phi.components().size());
    for (const auto& comp : phi.components())
        dT.push_back(exterior_derivative(DifferentialForm::function(comp)));

    std::map<IndexTuple, NormalForm> acc;
    for (const auto& [t, c] : a.coefficients()) {
        DifferentialForm w = DifferentialForm::function(c.substitute(phi.components(), src));
        for (int idx : t) w = wedge(w, dT[idx]);
        for (const auto& [wt, wc] : w.coefficients()) {
            auto it = acc.find(wt);
            if (it == acc.end())
                acc.emplace(wt, wc.normal_form());
            else
                it->second = it->second.plus(wc.normal_form());
        }
    }
    return DifferentialForm::from_accumulated(src, a.degree(), std::move(acc));
}

/// A smooth curve into a chart: per-coordinate expressions in one parameter t
/// over the given interval. A single smooth piece; piecewise curves are
/// sequences of these.
class CurveSpec {
public:
    CurveSpec(ChartPtr target, std::vector<std::string> component_exprs, double t0, double t1,
              const std::string& param_name = "t")
        : param_chart_(make_chart({param_name}, {false})),
          map_(param_chart_, std::move(target), parse_components(component_exprs, param_chart_)),
          t0_(t0),
          t1_(t1) {}

    CurveSpec(ChartPtr target, std::vector<ScalarExpr> components, double t0, double t1,
              ChartPtr param_chart)
        : param_chart_(std::move(param_chart)),
          map_(param_chart_, std::move(target), std::move(components)),
          t0_(t0),
          t1_(t1) {}

    const ChartPtr& param_chart() const { return param_chart_; }
    const ChartMap& as_map() const { return map_; }
    const ChartPtr& target() const { return map_.target(); }
    double t0() const { return t0_; }
    double t1() const { return t1_; }

    /// Velocity components, as expressions in the parameter.
    std::vector<ScalarExpr> velocity() const {
        std::vector<ScalarExpr> v;
        for (const auto& c : map_.components()) v.push_back(c.differentiate(0));
        return v;
    }

    Point position(double t) const { return map_.apply(Point(param_chart_, {t})); }
    std::vector<double> velocity_at(double t) const {
        Point p(param_chart_, {t});
        std::vector<double> v;
        for (const auto& c : velocity()) v.push_back(c.evaluate(p));
        return v;
    }

private:
    static std::vector<ScalarExpr> parse_components(const std::vector<std::string>& exprs,
                                                    const ChartPtr& chart) {
        std::vector<ScalarExpr> comps;
        for (const auto& e : exprs) comps.push_back(parse_expr(e, chart));
        return comps;
    }

    ChartPtr param_chart_;
    ChartMap map_;
    double t0_, t1_;
};

}  // namespace cpair
