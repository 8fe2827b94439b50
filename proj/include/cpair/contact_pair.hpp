#pragma once

#include "cpair/chart_map.hpp"
#include "cpair/differential_form.hpp"
#include "cpair/grid.hpp"
#include "cpair/linalg.hpp"
#include "cpair/vector_field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpair {

enum class CheckStatus { SymbolicPass, SymbolicFail, NumericPass, NumericFail };

inline bool status_passed(CheckStatus s) {
    return s == CheckStatus::SymbolicPass || s == CheckStatus::NumericPass;
}
inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::SymbolicPass: return "symbolic_pass";
        case CheckStatus::SymbolicFail: return "symbolic_fail";
        case CheckStatus::NumericPass: return "numeric_pass";
        case CheckStatus::NumericFail: return "numeric_fail";
    }
    return "?";
}

struct ConditionResult {
    std::string name;
    CheckStatus status = CheckStatus::SymbolicFail;
    std::optional<double> min_abs;               // numeric checks: min |value| over grid
    std::optional<std::vector<double>> argmin;   // where the minimum is attained
    std::optional<std::string> residual;         // symbolic witness on failure
    std::optional<std::string> note;

    bool passed() const { return status_passed(status); }
};

struct VerifyOptions {
    int grid_points = 17;
    double tol = 1e-9;
    std::uint64_t seed = 42;
    int sample_count = 50;
};

/// The central object: a pair of 1-forms (alpha, eta) of type (h, k) on a
/// chart of dimension 2h+2k+2, with h >= 1 or k >= 1.
class ContactPair {
public:
    ContactPair(DifferentialForm alpha, DifferentialForm eta, int h, int k)
        : alpha_(std::move(alpha)), eta_(std::move(eta)), h_(h), k_(k) {
        require_same_chart(alpha_.chart(), eta_.chart(), "ContactPair");
        if (alpha_.degree() != 1 || eta_.degree() != 1)
            throw Error("ContactPair: both forms must have degree 1");
        if (h < 0 || k < 0) throw Error("ContactPair: negative type");
        if (h == 0 && k == 0) throw Error("ContactPair: type (0,0) is excluded");
        if (2 * h + 2 * k + 2 != chart()->dimension())
            throw Error("ContactPair: 2h+2k+2 != chart dimension");
    }

    const ChartPtr& chart() const { return alpha_.chart(); }
    const DifferentialForm& alpha() const { return alpha_; }
    const DifferentialForm& eta() const { return eta_; }
    int h() const { return h_; }
    int k() const { return k_; }

    bool darboux_shaped() const { return darboux_shaped_; }

private:
    DifferentialForm alpha_, eta_;
    int h_, k_;
    bool darboux_shaped_ = false;

    friend ContactPair darboux_pair(int, int);
};

/// The model pair alpha = dx_{2h+1} + sum x_{2i-1} dx_{2i},
/// eta = dy_{2k+1} + sum y_{2i-1} dy_{2i} on R^{2h+2k+2} (a vanishing sum when
/// h = 0 or k = 0).
inline ContactPair darboux_pair(int h, int k) {
    if (h < 0 || k < 0 || (h == 0 && k == 0))
        throw Error("darboux_pair: need h >= 1 or k >= 1");
    std::vector<std::string> names;
    for (int i = 1; i <= 2 * h + 1; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= 2 * k + 1; ++i) names.push_back("y" + std::to_string(i));
    ChartPtr chart = euclidean_chart(names);
    const int nx = 2 * h + 1;

    DifferentialForm alpha(chart, 1);
    alpha.add_term({nx - 1}, ScalarExpr::constant(chart, Rational(1)));
    for (int i = 1; i <= h; ++i)
        alpha.add_term({2 * i - 1}, ScalarExpr::coordinate(chart, 2 * i - 2));

    DifferentialForm eta(chart, 1);
    eta.add_term({nx + 2 * k}, ScalarExpr::constant(chart, Rational(1)));
    for (int i = 1; i <= k; ++i)
        eta.add_term({nx + 2 * i - 1}, ScalarExpr::coordinate(chart, nx + 2 * i - 2));

    ContactPair cp(std::move(alpha), std::move(eta), h, k);
    cp.darboux_shaped_ = true;
    return cp;
}

struct VerificationReport {
    std::string pair_name;
    std::vector<ConditionResult> conditions;
    int grid_points = 17;
    double tol = 1e-9;
    std::uint64_t seed = 42;
    std::string region;

    bool passed() const {
        for (const auto& c : conditions)
            if (!c.passed()) return false;
        return !conditions.empty();
    }
    const ConditionResult* find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline ConditionResult closedness_condition(const std::string& name,
                                            const DifferentialForm& power) {
    ConditionResult c;
    c.name = name;
    c.status = CheckStatus::SymbolicPass;
    for (const auto& [t, coef] : power.coefficients()) {
        if (!is_zero(coef)) {
            c.status = CheckStatus::SymbolicFail;
            std::string tuple;
            for (int i : t) tuple += (tuple.empty() ? "" : ",") + power.chart()->name(i);
            c.residual = "non-zero coefficient " + normalize(coef).to_string() + " on (" +
                         tuple + ")";
            break;
        }
    }
    return c;
}

/// Non-vanishing check of a scalar: symbolic constant fast path, grid
/// minimum otherwise.
inline ConditionResult nonvanishing_condition(const std::string& name, const ScalarExpr& value,
                                              const VerifyOptions& opt) {
    ConditionResult c;
    c.name = name;
    ScalarExpr v = normalize(value);
    if (v.normal_form().is_zero()) {
        c.status = CheckStatus::SymbolicFail;
        c.residual = "identically zero";
        return c;
    }
    if (is_constant(v)) {
        c.status = CheckStatus::SymbolicPass;
        c.note = "constant " + v.to_string();
        return c;
    }
    GridSpec grid(value.chart(), opt.grid_points);
    GridMin m = grid_min_abs(grid, CompiledScalar(v));
    if (m.min_abs > opt.tol) {
        c.status = CheckStatus::NumericPass;
    } else {
        c.status = CheckStatus::NumericFail;
    }
    c.min_abs = m.min_abs;
    c.argmin = m.argmin;
    return c;
}

inline std::string region_string(const ChartPtr& chart) {
    std::string s;
    for (int i = 0; i < chart->dimension(); ++i) {
        if (!s.empty()) s += " x ";
        s += chart->periodic(i) ? "[0,2pi)" : "[-1,1]";
    }
    return s;
}

}  // namespace detail

/// The top coefficient of alpha ^ (d alpha)^h ^ eta ^ (d eta)^k.
inline ScalarExpr volume_coefficient(const ContactPair& cp) {
    DifferentialForm top = wedge(wedge(cp.alpha(), form_power(exterior_derivative(cp.alpha()),
                                                              cp.h())),
                                 wedge(cp.eta(), form_power(exterior_derivative(cp.eta()),
                                                            cp.k())));
    IndexTuple full(cp.chart()->dimension());
    for (int i = 0; i < cp.chart()->dimension(); ++i) full[i] = i;
    return top.coefficient(full);
}

/// Definition check: (d alpha)^{h+1} = 0 and (d eta)^{k+1} = 0 symbolically,
/// then the top form coefficient must be non-vanishing (a symbolic non-zero
/// constant certifies globally; otherwise the grid minimum must clear tol on
/// the stated region).
inline VerificationReport verify(const ContactPair& cp, const VerifyOptions& opt = {}) {
    VerificationReport rep;
    rep.grid_points = opt.grid_points;
    rep.tol = opt.tol;
    rep.seed = opt.seed;
    rep.region = detail::region_string(cp.chart());

    DifferentialForm da = exterior_derivative(cp.alpha());
    DifferentialForm de = exterior_derivative(cp.eta());
    rep.conditions.push_back(
        detail::closedness_condition("d_alpha_power_closed", form_power(da, cp.h() + 1)));
    rep.conditions.push_back(
        detail::closedness_condition("d_eta_power_closed", form_power(de, cp.k() + 1)));
    rep.conditions.push_back(detail::nonvanishing_condition("volume", volume_coefficient(cp), opt));
    return rep;
}

// ---------------------------------------------------------------------------
// Reeb vector fields.
// ---------------------------------------------------------------------------

/// One Reeb field, possibly in homogeneous form: raw is the unique V with
/// i(V) mu = Omega against the coordinate volume mu, scale is the pairing
/// (alpha(V) resp. eta(V)), and the normalized field raw/scale is stored
/// exactly when the division stays in the expression class. Downstream
/// identities for non-exact fields are checked in cleared-denominator form.
struct ReebField {
    VectorField raw;
    ScalarExpr scale;
    std::optional<VectorField> exact;

    bool is_exact() const { return exact.has_value(); }
    const VectorField& field() const {
        if (!exact) throw Error("ReebField: field is pointwise-only");
        return *exact;
    }
    std::vector<double> evaluate(const Point& p) const {
        std::vector<double> v = raw.evaluate(p);
        double s = scale.evaluate(p);
        for (double& x : v) x /= s;
        return v;
    }
};

struct ReebPair {
    ReebField alpha_field;  // X_alpha
    ReebField eta_field;    // X_eta
    bool exact() const { return alpha_field.is_exact() && eta_field.is_exact(); }
};

namespace detail {

/// Recovers V with i(V) mu = omega for an (n-1)-form omega:
/// V^j = (-1)^{j-1} * coefficient of the tuple omitting j (1-based j).
inline VectorField vector_from_top_contraction(const DifferentialForm& omega) {
    const ChartPtr& chart = omega.chart();
    const int n = chart->dimension();
    if (omega.degree() != n - 1)
        throw Error("vector_from_top_contraction: degree must be dim-1");
    std::vector<ScalarExpr> comps;
    for (int j = 0; j < n; ++j) {
        IndexTuple t;
        for (int i = 0; i < n; ++i)
            if (i != j) t.push_back(i);
        ScalarExpr c = omega.coefficient(t);
        comps.push_back(j % 2 == 0 ? c : -c);
    }
    return VectorField(chart, std::move(comps));
}

inline ReebField make_reeb_field(const DifferentialForm& omega, const DifferentialForm& pairing_form,
                                 const char* which) {
    VectorField raw = vector_from_top_contraction(omega);
    ScalarExpr scale = normalize(pair_form_field(pairing_form, raw));
    if (scale.normal_form().is_zero())
        throw Error(std::string("reeb_fields: ") + which +
                    "(V) is identically zero; the pair cannot be verified (internal "
                    "inconsistency)");
    ReebField rf{raw, scale, std::nullopt};
    std::vector<ScalarExpr> divided;
    bool all = true;
    for (const auto& comp : raw.components()) {
        auto q = try_divide(comp, scale);
        if (!q) {
            all = false;
            break;
        }
        divided.push_back(normalize(*q));
    }
    if (all) rf.exact = VectorField(raw.chart(), std::move(divided));
    return rf;
}

}  // namespace detail

/// The unique fields with alpha(X_alpha) = 1, i(X_alpha)((d a)^h ^ eta ^
/// (d e)^k) = 0 and symmetrically eta(X_eta) = 1, i(X_eta)(alpha ^ (d a)^h ^
/// (d e)^k) = 0.
inline ReebPair reeb_fields(const ContactPair& cp) {
    DifferentialForm da = exterior_derivative(cp.alpha());
    DifferentialForm de = exterior_derivative(cp.eta());
    DifferentialForm omega_alpha =
        wedge(form_power(da, cp.h()), wedge(cp.eta(), form_power(de, cp.k())));
    DifferentialForm omega_eta =
        wedge(wedge(cp.alpha(), form_power(da, cp.h())), form_power(de, cp.k()));
    ReebPair rp{detail::make_reeb_field(omega_alpha, cp.alpha(), "alpha"),
                detail::make_reeb_field(omega_eta, cp.eta(), "eta")};
    return rp;
}

struct ReebPropertyReport {
    std::vector<ConditionResult> conditions;
    bool passed() const {
        for (const auto& c : conditions)
            if (!c.passed()) return false;
        return !conditions.empty();
    }
};

namespace detail {

inline ConditionResult symbolic_zero_condition(const std::string& name, const ScalarExpr& e) {
    ConditionResult c;
    c.name = name;
    if (is_zero(e)) {
        c.status = CheckStatus::SymbolicPass;
    } else {
        c.status = CheckStatus::SymbolicFail;
        c.residual = normalize(e).to_string();
    }
    return c;
}

inline ConditionResult symbolic_zero_condition(const std::string& name,
                                               const DifferentialForm& f) {
    ConditionResult c;
    c.name = name;
    c.status = CheckStatus::SymbolicPass;
    for (const auto& [t, coef] : f.coefficients()) {
        if (!is_zero(coef)) {
            c.status = CheckStatus::SymbolicFail;
            c.residual = normalize(coef).to_string();
            return c;
        }
    }
    return c;
}

inline ConditionResult symbolic_zero_condition(const std::string& name, const VectorField& X) {
    ConditionResult c;
    c.name = name;
    c.status = CheckStatus::SymbolicPass;
    for (const auto& comp : X.components()) {
        if (!is_zero(comp)) {
            c.status = CheckStatus::SymbolicFail;
            c.residual = normalize(comp).to_string();
            return c;
        }
    }
    return c;
}

}  // namespace detail

/// The absorption/annihilation identities, commutation, and flow invariance
/// of the Reeb pair, checked symbolically. Non-exact fields are checked in
/// cleared-denominator form (valid wherever the volume is non-zero, i.e.
/// everywhere on a verified pair); exact fields additionally get the direct
/// normalized identities.
inline ReebPropertyReport check_reeb_properties(const ContactPair& cp, const ReebPair& rp) {
    using detail::symbolic_zero_condition;
    ReebPropertyReport rep;
    const DifferentialForm da = exterior_derivative(cp.alpha());
    const DifferentialForm de = exterior_derivative(cp.eta());
    const VectorField& V = rp.alpha_field.raw;
    const VectorField& W = rp.eta_field.raw;
    const ScalarExpr& s = rp.alpha_field.scale;  // alpha(V)
    const ScalarExpr& u = rp.eta_field.scale;    // eta(W)

    rep.conditions.push_back(
        symbolic_zero_condition("eta(X_alpha)", pair_form_field(cp.eta(), V)));
    rep.conditions.push_back(
        symbolic_zero_condition("alpha(X_eta)", pair_form_field(cp.alpha(), W)));
    rep.conditions.push_back(symbolic_zero_condition("i(X_alpha)d_alpha", interior_product(V, da)));
    rep.conditions.push_back(symbolic_zero_condition("i(X_alpha)d_eta", interior_product(V, de)));
    rep.conditions.push_back(symbolic_zero_condition("i(X_eta)d_alpha", interior_product(W, da)));
    rep.conditions.push_back(symbolic_zero_condition("i(X_eta)d_eta", interior_product(W, de)));

    // Normalization: alpha(X_alpha) = 1 and eta(X_eta) = 1. In homogeneous
    // form these are alpha(V) = scale by construction; for exact fields the
    // normalized identity is checked directly.
    {
        ScalarExpr one = ScalarExpr::constant(cp.chart(), Rational(1));
        if (rp.alpha_field.is_exact())
            rep.conditions.push_back(symbolic_zero_condition(
                "alpha(X_alpha)-1", pair_form_field(cp.alpha(), rp.alpha_field.field()) - one));
        else
            rep.conditions.push_back(symbolic_zero_condition(
                "alpha(X_alpha)-1 (cleared)", pair_form_field(cp.alpha(), V) - s));
        if (rp.eta_field.is_exact())
            rep.conditions.push_back(symbolic_zero_condition(
                "eta(X_eta)-1", pair_form_field(cp.eta(), rp.eta_field.field()) - one));
        else
            rep.conditions.push_back(symbolic_zero_condition(
                "eta(X_eta)-1 (cleared)", pair_form_field(cp.eta(), W) - u));
    }

    // Commutation [X_alpha, X_eta] = 0; cleared form:
    // s*u*[V,W] - s*(V.u)*W + u*(W.s)*V = 0.
    if (rp.exact()) {
        rep.conditions.push_back(symbolic_zero_condition(
            "[X_alpha,X_eta]", lie_bracket(rp.alpha_field.field(), rp.eta_field.field())));
    } else {
        VectorField cleared = lie_bracket(V, W) * (s * u) - W * (V.apply(u) * s) + V * (W.apply(s) * u);
        rep.conditions.push_back(symbolic_zero_condition("[X_alpha,X_eta] (cleared)", cleared));
    }

    // Flow invariance L_X alpha = L_X eta = 0 for both fields; cleared:
    // L_V alpha = d(alpha(V)), L_V eta = 0 (using eta(V) = 0), symmetrically.
    DifferentialForm ds1 = exterior_derivative(DifferentialForm::function(s));
    DifferentialForm du1 = exterior_derivative(DifferentialForm::function(u));
    rep.conditions.push_back(
        symbolic_zero_condition("L_{X_alpha}alpha", lie_derivative(V, cp.alpha()) - ds1));
    rep.conditions.push_back(
        symbolic_zero_condition("L_{X_alpha}eta", lie_derivative(V, cp.eta())));
    rep.conditions.push_back(
        symbolic_zero_condition("L_{X_eta}eta", lie_derivative(W, cp.eta()) - du1));
    rep.conditions.push_back(
        symbolic_zero_condition("L_{X_eta}alpha", lie_derivative(W, cp.alpha())));
    return rep;
}

// ---------------------------------------------------------------------------
// Characteristic distributions and involutivity.
// ---------------------------------------------------------------------------

struct DistributionBasis {
    int dimension = 0;
    Eigen::MatrixXd basis;  // columns span {v : form(v) = 0, i(v) dform = 0}
};

/// Pointwise kernel of {form, d form} via the null space of the stacked
/// (1 + n) x n matrix.
inline DistributionBasis characteristic_distribution(const DifferentialForm& form,
                                                     const Point& p) {
    if (form.degree() != 1) throw Error("characteristic_distribution: form degree must be 1");
    const int n = form.chart()->dimension();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1 + n, n);
    for (const auto& [t, c] : form.coefficients()) A(0, t[0]) = c.evaluate(p);
    DifferentialForm df = exterior_derivative(form);
    for (const auto& [t, c] : df.coefficients()) {
        double v = c.evaluate(p);
        A(1 + t[0], t[1]) += v;
        A(1 + t[1], t[0]) -= v;
    }
    DistributionBasis r;
    r.basis = kernel_basis(A);
    r.dimension = static_cast<int>(r.basis.cols());
    return r;
}

struct InvolutivityReport {
    double max_residual = 0;
    int pairs_checked = 0;
    int points_checked = 0;
    bool passed(double tol) const { return max_residual < tol; }
};

/// Checks that all pairwise Lie brackets of the frame re-expand in the frame
/// at each sample point (least-squares residual below tol in the caller).
inline InvolutivityReport involutivity_check(const std::vector<VectorField>& frame,
                                             const std::vector<Point>& samples) {
    if (frame.empty()) throw Error("involutivity_check: no frame available");
    InvolutivityReport rep;
    const int n = frame.front().chart()->dimension();
    for (std::size_t i = 0; i < frame.size(); ++i)
        for (std::size_t j = i + 1; j < frame.size(); ++j) {
            VectorField br = lie_bracket(frame[i], frame[j]);
            for (const Point& p : samples) {
                Eigen::MatrixXd F(n, frame.size());
                for (std::size_t c = 0; c < frame.size(); ++c) {
                    std::vector<double> col = frame[c].evaluate(p);
                    for (int r = 0; r < n; ++r) F(r, c) = col[r];
                }
                std::vector<double> bv = br.evaluate(p);
                Eigen::VectorXd b(n);
                for (int r = 0; r < n; ++r) b(r) = bv[r];
                LinearSolve sol = solve_least_squares(F, b);
                rep.max_residual = std::max(rep.max_residual, sol.residual);
            }
            ++rep.pairs_checked;
        }
    rep.points_checked = static_cast<int>(samples.size());
    return rep;
}

// ---------------------------------------------------------------------------
// Legendrian curves.
// ---------------------------------------------------------------------------

enum class PairSide { Alpha, Eta };

struct LegendrianReport {
    ConditionResult tangency;      // alpha(gamma') = 0 symbolically
    ConditionResult transversality;  // i(gamma')(eta ^ (d eta)^k) != 0 at samples
    bool passed() const { return tangency.passed() && transversality.passed(); }
};

namespace detail {

inline std::map<IndexTuple, double> contract_numeric(const std::map<IndexTuple, double>& form,
                                                     const std::vector<double>& v) {
    std::map<IndexTuple, double> r;
    for (const auto& [t, c] : form) {
        for (std::size_t pos = 0; pos < t.size(); ++pos) {
            IndexTuple rest;
            for (std::size_t q = 0; q < t.size(); ++q)
                if (q != pos) rest.push_back(t[q]);
            double sgn = (pos % 2 == 0) ? 1.0 : -1.0;
            r[rest] += sgn * v[t[pos]] * c;
        }
    }
    return r;
}

}  // namespace detail

/// Legendrian test with respect to one side of the pair: the tangency
/// condition is symbolic (the curve composition stays in class); the
/// transversality condition i(gamma')(other ^ (d other)^m) != 0 is sampled
/// along the parameter interval.
inline LegendrianReport legendrian_check(const ContactPair& cp, const CurveSpec& curve,
                                         PairSide wrt, int samples = 32, double tol = 1e-9) {
    require_same_chart(curve.target(), cp.chart(), "legendrian_check");
    const DifferentialForm& primary = (wrt == PairSide::Alpha) ? cp.alpha() : cp.eta();
    const DifferentialForm& other = (wrt == PairSide::Alpha) ? cp.eta() : cp.alpha();
    const int m = (wrt == PairSide::Alpha) ? cp.k() : cp.h();

    LegendrianReport rep;

    // alpha(gamma'(t)) as an expression in the parameter.
    std::vector<ScalarExpr> vel = curve.velocity();
    ScalarExpr pairing = ScalarExpr::constant(curve.param_chart(), Rational(0));
    for (const auto& [t, c] : primary.coefficients())
        pairing = pairing + c.substitute(curve.as_map().components(), curve.param_chart()) *
                                vel[t[0]];
    rep.tangency = detail::symbolic_zero_condition("tangency", pairing);

    // i(gamma')(other ^ (d other)^m) evaluated along the curve.
    DifferentialForm big = wedge(other, form_power(exterior_derivative(other), m));
    rep.transversality.name = "transversality";
    double global_min = std::numeric_limits<double>::infinity();
    std::vector<double> worst{curve.t0()};
    for (int i = 0; i < samples; ++i) {
        double t = curve.t0() + (curve.t1() - curve.t0()) * (samples == 1 ? 0.5 : double(i) / (samples - 1));
        Point p = curve.position(t);
        auto contracted = detail::contract_numeric(big.evaluate(p), curve.velocity_at(t));
        double maxc = 0;
        for (const auto& [tt, c] : contracted) maxc = std::max(maxc, std::abs(c));
        if (maxc < global_min) {
            global_min = maxc;
            worst = {t};
        }
    }
    rep.transversality.min_abs = global_min;
    rep.transversality.argmin = worst;
    rep.transversality.status =
        global_min > tol ? CheckStatus::NumericPass : CheckStatus::NumericFail;
    return rep;
}

// ---------------------------------------------------------------------------
// Hamiltonian-type fields and the function brackets.
// ---------------------------------------------------------------------------

struct HamiltonianSolve {
    Eigen::VectorXd field;
    double residual = 0;
    double condition = 0;
};

/// Pointwise solve for the leafwise Hamiltonian-type field of f: tangency to
/// the leaf (eta(X) = 0, i(X) d eta = 0), alpha(X) = f, and vanishing of
/// (df + i(X) d alpha) ^ alpha on pairs of leaf-tangent vectors. The leaf
/// tangent space is ker eta ∩ ker d eta at p. Sides swap for wrt = Eta.
inline HamiltonianSolve hamiltonian_field(const ContactPair& cp, const ScalarExpr& f,
                                          PairSide wrt, const Point& p) {
    require_same_chart(f.chart(), cp.chart(), "hamiltonian_field");
    const DifferentialForm& A = (wrt == PairSide::Alpha) ? cp.alpha() : cp.eta();
    const DifferentialForm& B = (wrt == PairSide::Alpha) ? cp.eta() : cp.alpha();
    const int n = cp.chart()->dimension();

    DifferentialForm dA = exterior_derivative(A);
    DifferentialForm dB = exterior_derivative(B);

    // Numeric data at p.
    Eigen::VectorXd a_vec = Eigen::VectorXd::Zero(n), b_vec = Eigen::VectorXd::Zero(n),
                    df_vec = Eigen::VectorXd::Zero(n);
    for (const auto& [t, c] : A.coefficients()) a_vec(t[0]) = c.evaluate(p);
    for (const auto& [t, c] : B.coefficients()) b_vec(t[0]) = c.evaluate(p);
    for (int i = 0; i < n; ++i) df_vec(i) = f.differentiate(i).evaluate(p);
    auto antisym = [&](const DifferentialForm& two_form) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [t, c] : two_form.coefficients()) {
            double v = c.evaluate(p);
            M(t[0], t[1]) += v;
            M(t[1], t[0]) -= v;
        }
        return M;
    };
    Eigen::MatrixXd dA_mat = antisym(dA), dB_mat = antisym(dB);

    // Leaf tangent space: ker B ∩ ker dB at p.
    DistributionBasis leaf = characteristic_distribution(B, p);
    const auto& U = leaf.basis;

    const int pairs = leaf.dimension * (leaf.dimension - 1) / 2;
    Eigen::MatrixXd M(1 + n + 1 + pairs, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M.rows());
    int row = 0;
    M.row(row++) = b_vec.transpose();                    // eta(X) = 0
    for (int i = 0; i < n; ++i) M.row(row++) = dB_mat.row(i);  // i(X) d eta = 0
    M.row(row) = a_vec.transpose();                      // alpha(X) = f(p)
    rhs(row++) = f.evaluate(p);
    for (int i = 0; i < leaf.dimension; ++i)
        for (int j = i + 1; j < leaf.dimension; ++j) {
            Eigen::VectorXd ui = U.col(i), uj = U.col(j);
            // (df + i(X) dA)(u) a(v) - (df + i(X) dA)(v) a(u) = 0
            Eigen::VectorXd coeff =
                (dA_mat * ui) * a_vec.dot(uj) - (dA_mat * uj) * a_vec.dot(ui);
            M.row(row) = coeff.transpose();
            rhs(row++) = -(df_vec.dot(ui) * a_vec.dot(uj) - df_vec.dot(uj) * a_vec.dot(ui));
        }

    LinearSolve sol = solve_least_squares(M, rhs);
    if (!sol.unique || sol.residual > 1e-7)
        throw Error("hamiltonian_field: singular or inconsistent system (condition number " +
                    std::to_string(sol.condition) + ", residual " +
                    std::to_string(sol.residual) + ")");
    return {sol.x, sol.residual, sol.condition};
}

/// Closed-form leafwise Hamiltonian field on Darboux charts (no division
/// needed, stays in class). For wrt = Alpha the leaf coordinates are the
/// x-block; for Eta the y-block.
inline VectorField darboux_hamiltonian_field(const ContactPair& cp, const ScalarExpr& f,
                                             PairSide wrt) {
    if (!cp.darboux_shaped()) throw Error("darboux_hamiltonian_field: not a Darboux pair");
    const ChartPtr& chart = cp.chart();
    const int h = cp.h(), k = cp.k();
    const int offset = (wrt == PairSide::Alpha) ? 0 : 2 * h + 1;
    const int m = (wrt == PairSide::Alpha) ? h : k;
    const int z = offset + 2 * m;  // index of the distinguished leaf coordinate

    ScalarExpr fz = f.differentiate(z);
    std::vector<ScalarExpr> comps(chart->dimension(), ScalarExpr::constant(chart, Rational(0)));
    ScalarExpr zcomp = f;
    for (int i = 1; i <= m; ++i) {
        int ui = offset + 2 * i - 2, vi = offset + 2 * i - 1;
        ScalarExpr gu = f.differentiate(ui);                                  // df/du_i
        ScalarExpr gv = f.differentiate(vi) - ScalarExpr::coordinate(chart, ui) * fz;
        comps[ui] = -gv;
        comps[vi] = gu;
        zcomp = zcomp - gu * ScalarExpr::coordinate(chart, ui);
    }
    comps[z] = zcomp;
    return VectorField(chart, std::move(comps));
}

/// {f, g} along the chosen side at p: alpha([X_f, X_g]) with the fields built
/// symbolically on Darboux charts, otherwise by a central-difference stencil
/// of pointwise solves.
inline double function_bracket(const ContactPair& cp, const ScalarExpr& f, const ScalarExpr& g,
                               PairSide wrt, const Point& p, double stencil_step = 1e-5) {
    const DifferentialForm& A = (wrt == PairSide::Alpha) ? cp.alpha() : cp.eta();
    const int n = cp.chart()->dimension();

    if (cp.darboux_shaped()) {
        VectorField Xf = darboux_hamiltonian_field(cp, f, wrt);
        VectorField Xg = darboux_hamiltonian_field(cp, g, wrt);
        return pair_form_field(A, lie_bracket(Xf, Xg)).evaluate(p);
    }

    // Stencil route: numeric Jacobians of the pointwise fields.
    auto solve_at = [&](const Point& q, const ScalarExpr& fn) {
        return hamiltonian_field(cp, fn, wrt, q).field;
    };
    Eigen::VectorXd Xf = solve_at(p, f), Xg = solve_at(p, g);
    Eigen::MatrixXd Jf(n, n), Jg(n, n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> plus = p.values(), minus = p.values();
        plus[i] += stencil_step;
        minus[i] -= stencil_step;
        Point pp(cp.chart(), plus), pm(cp.chart(), minus);
        Jf.col(i) = (solve_at(pp, f) - solve_at(pm, f)) / (2 * stencil_step);
        Jg.col(i) = (solve_at(pp, g) - solve_at(pm, g)) / (2 * stencil_step);
    }
    Eigen::VectorXd bracket = Jg * Xf - Jf * Xg;
    double value = 0;
    for (const auto& [t, c] : A.coefficients()) value += c.evaluate(p) * bracket(t[0]);
    return value;
}

// ---------------------------------------------------------------------------
// Flow transport (numeric invariance certificate).
// ---------------------------------------------------------------------------

struct FlowTransportReport {
    double max_deviation = 0;
    int points = 0;
    bool passed(double tol) const { return max_deviation < tol; }
};

/// Integrates the flow of X for the given time (RK4 with the given step) at
/// each probe point and compares the pulled-back coefficients of both forms
/// with their values at the start point: (phi_T^* form)_p vs form_p.
inline FlowTransportReport flow_transport_check(const ContactPair& cp, const ReebField& X,
                                                const std::vector<Point>& probes,
                                                double time = 0.1, double step = 1e-3) {
    const ChartPtr& chart = cp.chart();
    const int n = chart->dimension();

    // Numeric field and Jacobian of X = raw/scale.
    std::vector<CompiledScalar> comp;
    CompiledScalar sc{normalize(X.scale)};
    std::vector<std::vector<CompiledScalar>> dcomp(n);
    std::vector<CompiledScalar> dsc;
    for (int i = 0; i < n; ++i) comp.emplace_back(normalize(X.raw.component(i)));
    for (int j = 0; j < n; ++j) dsc.emplace_back(normalize(X.scale.differentiate(j)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dcomp[i].emplace_back(normalize(X.raw.component(i).differentiate(j)));

    auto field = [&](const Eigen::VectorXd& x) {
        std::vector<double> xs(x.data(), x.data() + n);
        double s = sc(xs);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = comp[i](xs) / s;
        return v;
    };
    auto dfield = [&](const Eigen::VectorXd& x) {
        std::vector<double> xs(x.data(), x.data() + n);
        double s = sc(xs);
        Eigen::MatrixXd J(n, n);
        for (int i = 0; i < n; ++i) {
            double vi = comp[i](xs);
            for (int j = 0; j < n; ++j) J(i, j) = (dcomp[i][j](xs) * s - vi * dsc[j](xs)) / (s * s);
        }
        return J;
    };

    auto covector = [&](const DifferentialForm& form, const std::vector<double>& at) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        Point q(chart, at);
        for (const auto& [t, c] : form.coefficients()) v(t[0]) = c.evaluate(q);
        return v;
    };

    FlowTransportReport rep;
    rep.points = static_cast<int>(probes.size());
    for (const Point& p : probes) {
        Eigen::VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0(i) = p[i];
        auto [x1, J] = rk4_flow_with_jacobian(field, dfield, x0, time, step);
        std::vector<double> end(x1.data(), x1.data() + n);
        for (const DifferentialForm* form : {&cp.alpha(), &cp.eta()}) {
            Eigen::VectorXd before = covector(*form, p.values());
            Eigen::VectorXd after = J.transpose() * covector(*form, end);
            rep.max_deviation = std::max(rep.max_deviation, (after - before).lpNorm<Eigen::Infinity>());
        }
    }
    return rep;
}

}  // namespace cpair
