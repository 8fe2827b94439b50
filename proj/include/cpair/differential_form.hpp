#pragma once

#include "cpair/normal_form.hpp"
#include "cpair/parser.hpp"
#include "cpair/scalar_expr.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace cpair {

using IndexTuple = std::vector<int>;  // strictly increasing, 0-based

/// Sign of sorting the concatenation of two disjoint increasing tuples into
/// one increasing tuple; 0 when they share an index.
inline int merge_tuples(const IndexTuple& a, const IndexTuple& b, IndexTuple& out) {
    out.clear();
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    int sign = 1;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return 0;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] jumps over the remaining entries of a
            if ((a.size() - i) % 2 == 1) sign = -sign;
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return sign;
}

/// A degree-k differential form on a chart, stored sparsely as strictly
/// increasing index tuples -> scalar coefficients. Coefficients are kept
/// normalized and identically-zero ones are never stored. A degree-0 form is
/// a single scalar under the empty tuple.
class DifferentialForm {
public:
    DifferentialForm(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {
        if (degree_ < 0) throw Error("DifferentialForm: negative degree");
    }

    static DifferentialForm zero(ChartPtr chart, int degree) {
        return DifferentialForm(std::move(chart), degree);
    }
    static DifferentialForm function(const ScalarExpr& f) {
        DifferentialForm r(f.chart(), 0);
        r.add_term({}, f);
        return r;
    }
    static DifferentialForm unit(const ChartPtr& chart) {
        return function(ScalarExpr::constant(chart, Rational(1)));
    }
    /// The coordinate 1-form dx_i.
    static DifferentialForm d_coordinate(const ChartPtr& chart, int i) {
        DifferentialForm r(chart, 1);
        r.add_term({i}, ScalarExpr::constant(chart, Rational(1)));
        return r;
    }

    const ChartPtr& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<IndexTuple, ScalarExpr>& coefficients() const { return coef_; }
    bool is_zero_form() const { return coef_.empty(); }

    /// Adds c * dx_I (normalizing and pruning); the workhorse of every ctor.
    /// Stored coefficients carry their normal forms, so accumulation happens
    /// at the normal-form level.
    void add_term(const IndexTuple& tuple, const ScalarExpr& c) {
        require_same_chart(chart_, c.chart(), "DifferentialForm::add_term");
        check_tuple(tuple);
        auto it = coef_.find(tuple);
        NormalForm total = it == coef_.end()
                               ? c.normal_form()
                               : it->second.normal_form().plus(c.normal_form());
        set_from_nf(tuple, std::move(total));
    }

    /// Coefficient of a tuple (zero expression when absent).
    ScalarExpr coefficient(const IndexTuple& tuple) const {
        auto it = coef_.find(tuple);
        if (it != coef_.end()) return it->second;
        return ScalarExpr::constant(chart_, Rational(0));
    }

    /// Degree-0 forms only: the underlying scalar.
    ScalarExpr scalar() const {
        if (degree_ != 0) throw Error("scalar(): degree is not 0");
        return coefficient({});
    }

    DifferentialForm operator+(const DifferentialForm& o) const {
        require_same_chart(chart_, o.chart_, "form addition");
        if (degree_ != o.degree_) throw Error("form addition: degree mismatch");
        DifferentialForm r = *this;
        for (const auto& [t, c] : o.coef_) r.add_term(t, c);
        return r;
    }
    DifferentialForm operator-() const { return *this * Rational(-1); }
    DifferentialForm operator-(const DifferentialForm& o) const { return *this + (-o); }
    DifferentialForm operator*(const ScalarExpr& f) const {
        DifferentialForm r(chart_, degree_);
        const NormalForm& fn = f.normal_form();
        for (const auto& [t, c] : coef_) r.set_from_nf(t, c.normal_form().times(fn));
        return r;
    }
    DifferentialForm operator*(const Rational& s) const {
        DifferentialForm r(chart_, degree_);
        for (const auto& [t, c] : coef_) r.set_from_nf(t, c.normal_form().scaled(s));
        return r;
    }

    std::map<IndexTuple, double> evaluate(const Point& p) const {
        require_same_chart(chart_, p.chart(), "evaluate_form");
        std::map<IndexTuple, double> r;
        for (const auto& [t, c] : coef_) r.emplace(t, c.evaluate(p));
        return r;
    }

    std::string to_string() const {
        if (coef_.empty()) return "0";
        std::string s;
        for (const auto& [t, c] : coef_) {
            if (!s.empty()) s += " + ";
            s += "(" + c.to_string() + ")";
            for (int i : t) s += "*d" + chart_->name(i);
        }
        return s;
    }

    /// Builds a form from accumulated per-tuple normal forms (the operation
    /// kernels below sum contributions at the normal-form level).
    static DifferentialForm from_accumulated(const ChartPtr& chart, int degree,
                                             std::map<IndexTuple, NormalForm>&& acc) {
        DifferentialForm r(chart, degree);
        for (auto& [t, nf] : acc) {
            r.check_tuple(t);
            r.set_from_nf(t, std::move(nf));
        }
        return r;
    }

private:
    void set_from_nf(const IndexTuple& tuple, NormalForm nf) {
        nf.reduce();
        if (nf.is_zero())
            coef_.erase(tuple);
        else
            coef_[tuple] = nf.to_expr(chart_);
    }

    void check_tuple(const IndexTuple& t) const {
        if (static_cast<int>(t.size()) != degree_)
            throw Error("DifferentialForm: tuple length != degree");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < 0 || t[i] >= chart_->dimension())
                throw Error("DifferentialForm: tuple index out of range");
            if (i > 0 && t[i - 1] >= t[i])
                throw Error("DifferentialForm: tuple not strictly increasing");
        }
    }

    ChartPtr chart_;
    int degree_;
    std::map<IndexTuple, ScalarExpr> coef_;
};

inline DifferentialForm operator*(const ScalarExpr& f, const DifferentialForm& a) { return a * f; }

/// Graded-commutative exterior product. Above top degree the result is the
/// (empty) zero form of degree p+q, matching exterior-algebra convention.
inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart(), b.chart(), "wedge");
    if (a.degree() + b.degree() > a.chart()->dimension())
        return DifferentialForm::zero(a.chart(), a.degree() + b.degree());
    IndexTuple merged;
    std::map<IndexTuple, NormalForm> acc;
    for (const auto& [ta, ca] : a.coefficients())
        for (const auto& [tb, cb] : b.coefficients()) {
            int sign = merge_tuples(ta, tb, merged);
            if (sign == 0) continue;
            NormalForm contrib =
                ca.normal_form().times(cb.normal_form()).scaled(Rational(sign));
            auto it = acc.find(merged);
            if (it == acc.end())
                acc.emplace(merged, std::move(contrib));
            else
                it->second = it->second.plus(contrib);
        }
    return DifferentialForm::from_accumulated(a.chart(), a.degree() + b.degree(),
                                              std::move(acc));
}

/// Exterior derivative, assembled from partial derivatives with the usual
/// alternating signs.
inline DifferentialForm exterior_derivative(const DifferentialForm& a) {
    const ChartPtr& chart = a.chart();
    if (a.degree() + 1 > chart->dimension())
        return DifferentialForm::zero(chart, a.degree() + 1);
    std::map<IndexTuple, NormalForm> acc;
    for (const auto& [t, c] : a.coefficients()) {
        for (int i = 0; i < chart->dimension(); ++i) {
            if (std::find(t.begin(), t.end(), i) != t.end()) continue;
            NormalForm dc = c.normal_form().differentiated(i);
            if (dc.is_zero()) continue;
            IndexTuple nt = t;
            auto pos = std::lower_bound(nt.begin(), nt.end(), i);
            int parity = static_cast<int>(pos - nt.begin());
            nt.insert(pos, i);
            if (parity % 2 == 1) dc = dc.scaled(Rational(-1));
            auto it = acc.find(nt);
            if (it == acc.end())
                acc.emplace(nt, std::move(dc));
            else
                it->second = it->second.plus(dc);
        }
    }
    return DifferentialForm::from_accumulated(chart, a.degree() + 1, std::move(acc));
}

/// m-fold wedge a ∧ ... ∧ a; m = 0 gives the constant function 1. Computed by
/// repeated wedge with intermediate normalization; degrees in this library
/// are tiny.
inline DifferentialForm form_power(const DifferentialForm& a, unsigned m) {
    if (m == 0) return DifferentialForm::unit(a.chart());
    DifferentialForm r = a;
    for (unsigned i = 1; i < m; ++i) r = wedge(r, a);
    return r;
}

/// Per-coefficient symbolic equality.
inline bool forms_equal(const DifferentialForm& a, const DifferentialForm& b) {
    if (a.degree() != b.degree()) return false;
    DifferentialForm d = a - b;
    return d.is_zero_form();
}

}  // namespace cpair
