#pragma once

#include "cpair/contact_pair.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpair {

/// Base data of a T^2-invariant pair on a principal torus bundle over the
/// 2-torus: alpha = beta + f1 theta^1 + f2 theta^2 and eta = gamma +
/// g1 theta^1 + g2 theta^2 in an invariant decomposition, with Omega^i the
/// curvature 2-forms of the connection. Everything lives on the base chart;
/// only (Omega^i, integral of Omega^i) ever enters the conditions.
struct BundleData {
    ChartPtr base;              // 2-dimensional, both coordinates periodic
    DifferentialForm beta;      // degree 1
    DifferentialForm gamma;     // degree 1
    ScalarExpr f1, f2;
    Rational g1{0}, g2{0};
    DifferentialForm omega1;    // degree 2
    DifferentialForm omega2;    // degree 2

    static BundleData flat(const ChartPtr& base) {
        return BundleData{base,
                          DifferentialForm::zero(base, 1),
                          DifferentialForm::zero(base, 1),
                          ScalarExpr::constant(base, Rational(0)),
                          ScalarExpr::constant(base, Rational(0)),
                          Rational(0),
                          Rational(0),
                          DifferentialForm::zero(base, 2),
                          DifferentialForm::zero(base, 2)};
    }

    void validate() const {
        if (base->dimension() != 2 || !base->all_periodic())
            throw Error("BundleData: base must be a 2-torus chart");
        require_same_chart(beta.chart(), base, "BundleData.beta");
        require_same_chart(gamma.chart(), base, "BundleData.gamma");
        require_same_chart(f1.chart(), base, "BundleData.f1");
        require_same_chart(f2.chart(), base, "BundleData.f2");
        require_same_chart(omega1.chart(), base, "BundleData.omega1");
        require_same_chart(omega2.chart(), base, "BundleData.omega2");
        if (beta.degree() != 1 || gamma.degree() != 1)
            throw Error("BundleData: beta/gamma must be 1-forms");
        if (omega1.degree() != 2 || omega2.degree() != 2)
            throw Error("BundleData: curvature forms must be 2-forms");
    }
};

enum class SingularVariant { All, Empty, Circles, Unknown };

inline const char* singular_variant_name(SingularVariant v) {
    switch (v) {
        case SingularVariant::All: return "all";
        case SingularVariant::Empty: return "empty";
        case SingularVariant::Circles: return "circles";
        case SingularVariant::Unknown: return "unknown";
    }
    return "?";
}

/// Requested singular set: the whole base, empty, or a union of circles
/// given as level sets of the second base coordinate. Levels are stored as
/// rational multiples of pi in [0, 2); an even count is required so signs can
/// alternate.
struct SingularSetSpec {
    SingularVariant variant = SingularVariant::Empty;
    std::vector<Rational> circle_levels;  // multiples of pi, sorted, in [0,2)

    static SingularSetSpec all() { return {SingularVariant::All, {}}; }
    static SingularSetSpec empty() { return {SingularVariant::Empty, {}}; }
    static SingularSetSpec circles(std::vector<Rational> levels) {
        SingularSetSpec s{SingularVariant::Circles, std::move(levels)};
        std::sort(s.circle_levels.begin(), s.circle_levels.end());
        if (s.circle_levels.empty() || s.circle_levels.size() % 2 != 0)
            throw Error("SingularSetSpec: circles need a positive even count "
                        "(adjacent components must carry opposite signs)");
        for (std::size_t i = 0; i < s.circle_levels.size(); ++i) {
            if (s.circle_levels[i] < 0 || s.circle_levels[i] >= 2)
                throw Error("SingularSetSpec: levels must lie in [0, 2pi) as multiples of pi");
            if (i > 0 && s.circle_levels[i] == s.circle_levels[i - 1])
                throw Error("SingularSetSpec: duplicate circle level");
        }
        return s;
    }
};

struct BundleReport {
    std::vector<ConditionResult> conditions;
    SingularVariant singular_variant = SingularVariant::Unknown;
    std::vector<Rational> singular_levels;   // exact levels (multiples of pi) when known
    std::vector<double> singular_levels_numeric;
    std::string singular_note;

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

/// h = g2 f1 - g1 f2, the function whose zero set (pulled back) is the
/// singular set.
inline ScalarExpr singular_function(const BundleData& bd) {
    return normalize(bd.f1 * ScalarExpr::constant(bd.base, bd.g2) -
                     bd.f2 * ScalarExpr::constant(bd.base, bd.g1));
}

namespace detail {

/// Tries to read h as a single harmonic a*sin/cos(m*theta2 + r*pi) and list
/// its zero levels exactly.
inline std::optional<std::vector<Rational>> single_harmonic_levels(const ScalarExpr& h) {
    auto terms = h.normal_form().real_terms();
    if (terms.size() != 1) return std::nullopt;
    const RealTerm& t = terms[0];
    if (t.trig == RealTerm::Trig::None || !t.mono.trivial()) return std::nullopt;
    if (t.freq.comps.size() != 1 || t.freq.comps[0].first != 1) return std::nullopt;
    const Rational& m = t.freq.comps[0].second;
    if (!is_integer(m) || m <= 0) return std::nullopt;
    long long mi = numerator(m).convert_to<long long>();
    // sin(m x + r pi) = 0  at  x = (j - r) pi / m;
    // cos(m x + r pi) = 0  at  x = (j + 1/2 - r) pi / m.
    Rational offset = -t.phase;
    if (t.trig == RealTerm::Trig::Cos) offset += Rational(1, 2);
    std::vector<Rational> levels;
    for (long long j = 0; j < 2 * mi; ++j) {
        Rational level = rational_mod((Rational(j) + offset) / m, Rational(2));
        levels.push_back(level);
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

}  // namespace detail

struct SingularClassification {
    ScalarExpr h;
    SingularVariant variant = SingularVariant::Unknown;
    std::vector<Rational> levels;          // exact, multiples of pi
    std::vector<double> levels_numeric;    // sign-change midpoints when inexact
    std::string note;
};

/// Classifies the zero set of h: identically zero (All), a non-vanishing
/// constant (Empty), a single harmonic in theta2 (Circles, exact levels), or
/// a grid-based sign map along the theta2 fiber.
inline SingularClassification classify_singular_set(const BundleData& bd, int fiber_points = 256,
                                                    double tol = 1e-9) {
    SingularClassification r;
    r.h = singular_function(bd);
    if (r.h.normal_form().is_zero()) {
        r.variant = SingularVariant::All;
        return r;
    }
    if (is_constant(r.h)) {
        r.variant = SingularVariant::Empty;
        r.note = "h is the non-zero constant " + r.h.to_string();
        return r;
    }
    if (auto levels = detail::single_harmonic_levels(r.h)) {
        r.variant = SingularVariant::Circles;
        r.levels = *levels;
        return r;
    }
    // Does h depend on theta1? Then the zero set is not a union of
    // theta2-circles; report a sign map note only.
    bool theta1_dependent = false;
    for (const auto& [key, c] : r.h.normal_form().groups()) {
        for (const auto& [i, p] : key.first.powers) theta1_dependent |= (i == 0);
        for (const auto& [i, q] : key.second.comps) theta1_dependent |= (i == 0);
    }
    if (theta1_dependent) {
        r.variant = SingularVariant::Unknown;
        r.note = "h depends on both base coordinates; no circle classification";
        return r;
    }
    // Sign map along a theta2 fiber.
    CompiledScalar hc{r.h};
    double prev = hc({0.0, 0.0});
    bool any_zeroish = std::abs(prev) <= tol;
    for (int i = 1; i <= fiber_points; ++i) {
        double x = 2.0 * std::numbers::pi * double(i) / fiber_points;
        double v = hc({0.0, x});
        if (std::abs(v) <= tol) any_zeroish = true;
        if ((prev < 0 && v > 0) || (prev > 0 && v < 0)) {
            double mid = 2.0 * std::numbers::pi * (double(i) - 0.5) / fiber_points;
            r.levels_numeric.push_back(mid);
        }
        prev = v;
    }
    if (r.levels_numeric.empty() && !any_zeroish) {
        r.variant = SingularVariant::Empty;
        r.note = "no sign change on the fiber grid";
    } else {
        r.variant = SingularVariant::Circles;
        r.note = "levels located numerically on a " + std::to_string(fiber_points) +
                 "-point fiber";
    }
    return r;
}

/// The invariant-pair conditions on the base:
///   cc1: beta ^ (g2 df1 - g1 df2) + (g2 f1 - g1 f2)(d beta + f1 Omega^1 +
///        f2 Omega^2) + (f2 df1 - f1 df2) ^ gamma  non-vanishing,
///   cc2: df1 ^ df2 = 0,
///   cc3: d gamma + g1 Omega^1 + g2 Omega^2 = 0 (the g's are constants by
///        construction of BundleData).
inline BundleReport check_conditions(const BundleData& bd, const VerifyOptions& opt = {}) {
    bd.validate();
    BundleReport rep;
    const ChartPtr& base = bd.base;
    auto cnst = [&](const Rational& q) { return ScalarExpr::constant(base, q); };

    DifferentialForm df1 = exterior_derivative(DifferentialForm::function(bd.f1));
    DifferentialForm df2 = exterior_derivative(DifferentialForm::function(bd.f2));

    rep.conditions.push_back(
        detail::closedness_condition("cc2_df1_wedge_df2", wedge(df1, df2)));

    DifferentialForm cc3_form = exterior_derivative(bd.gamma) + bd.omega1 * bd.g1 +
                                bd.omega2 * bd.g2;
    rep.conditions.push_back(detail::closedness_condition("cc3_dgamma_plus_classes", cc3_form));

    ScalarExpr h = singular_function(bd);
    DifferentialForm cc1_form =
        wedge(bd.beta, df1 * cnst(bd.g2) - df2 * cnst(bd.g1)) +
        (exterior_derivative(bd.beta) + bd.omega1 * bd.f1 + bd.omega2 * bd.f2) * h +
        wedge(df1 * bd.f2 - df2 * bd.f1, bd.gamma);
    rep.conditions.push_back(
        detail::nonvanishing_condition("cc1_nonvanishing", cc1_form.coefficient({0, 1}), opt));

    SingularClassification cls = classify_singular_set(bd);
    rep.singular_variant = cls.variant;
    rep.singular_levels = cls.levels;
    rep.singular_levels_numeric = cls.levels_numeric;
    rep.singular_note = cls.note;
    return rep;
}

// ---------------------------------------------------------------------------
// Constructors for the three singular-set cases.
// ---------------------------------------------------------------------------

/// Witness data for the singular set = whole base: gamma = dtheta1,
/// f1 = sin(theta2), f2 = cos(theta2), g1 = g2 = 0 on a flat bundle.
inline BundleData construct_sigma_full(const ChartPtr& base = torus_chart(2)) {
    BundleData bd = BundleData::flat(base);
    bd.gamma = DifferentialForm::d_coordinate(base, 0);
    bd.f1 = parse_expr("sin(" + base->name(1) + ")", base);
    bd.f2 = parse_expr("cos(" + base->name(1) + ")", base);
    return bd;
}

/// Term-wise Fourier inversion: the unique-in-class primitive gamma with
/// d gamma = -F for a trig-polynomial 2-form F with zero total integral (the
/// zero-frequency obstruction).
inline DifferentialForm fourier_primitive(const DifferentialForm& F) {
    if (F.degree() != 2 || F.chart()->dimension() != 2)
        throw Error("fourier_primitive: expected a 2-form on a 2-torus chart");
    const ChartPtr& base = F.chart();
    if (!base->all_periodic()) throw Error("fourier_primitive: base must be a torus");
    ScalarExpr coef = F.coefficient({0, 1});
    validate_periodic_frequencies(coef);
    TorusIntegral total = integrate_torus(coef);
    if (total.coefficient != 0)
        throw Error("fourier_primitive: non-zero total integral, no primitive exists");

    DifferentialForm gamma(base, 1);
    for (const RealTerm& t : coef.normal_form().real_terms()) {
        if (t.trig == RealTerm::Trig::None)
            throw Error("fourier_primitive: unexpected constant term");  // excluded above
        Rational n1(0), n2(0);
        for (const auto& [i, q] : t.freq.comps) (i == 0 ? n1 : n2) = q;
        LinearArg arg;
        for (const auto& [i, q] : t.freq.comps) arg.add_coord(i, q);
        arg.pi_coeff = t.phase;
        ScalarExpr c = ScalarExpr::constant(base, t.coef);
        for (unsigned i = 0; i < t.mono.pi_pow; ++i) c = c * ScalarExpr::pi(base);
        bool is_sin = t.trig == RealTerm::Trig::Sin;
        if (n1 != 0) {
            ScalarExpr g = is_sin ? c * ScalarExpr::constant(base, 1 / n1) *
                                        ScalarExpr::cos_of(base, arg)
                                  : c * ScalarExpr::constant(base, -1 / n1) *
                                        ScalarExpr::sin_of(base, arg);
            gamma.add_term({1}, g);
        } else if (n2 != 0) {
            ScalarExpr g = is_sin ? c * ScalarExpr::constant(base, -1 / n2) *
                                        ScalarExpr::cos_of(base, arg)
                                  : c * ScalarExpr::constant(base, 1 / n2) *
                                        ScalarExpr::sin_of(base, arg);
            gamma.add_term({0}, g);
        } else {
            throw Error("fourier_primitive: zero-frequency trig term (internal)");
        }
    }
    return gamma;
}

/// The empty-singular-set construction. Requires a non-vanishing
/// characteristic class: picks rational (g1, g2) != (0,0) with
/// g1*I1 + g2*I2 = 0, sets f1 = g2, f2 = -g1, builds gamma as a primitive and
/// beta so that d beta + g2 Omega^1 - g1 Omega^2 is the constant multiple
/// l = g2 I1 - g1 I2 of the base volume form.
inline BundleData construct_sigma_empty(const DifferentialForm& omega1,
                                        const DifferentialForm& omega2) {
    require_same_chart(omega1.chart(), omega2.chart(), "construct_sigma_empty");
    const ChartPtr& base = omega1.chart();
    if (omega1.degree() != 2 || omega2.degree() != 2)
        throw Error("construct_sigma_empty: curvature forms must be 2-forms");

    Rational I1 = integrate_torus(omega1.coefficient({0, 1})).coefficient;
    Rational I2 = integrate_torus(omega2.coefficient({0, 1})).coefficient;
    if (I1 == 0 && I2 == 0)
        throw Error("construct_sigma_empty: both characteristic classes vanish; no such "
                    "invariant pair exists on the trivial bundle");

    BundleData bd = BundleData::flat(base);
    bd.omega1 = omega1;
    bd.omega2 = omega2;
    bd.g1 = -I2;
    bd.g2 = I1;
    bd.f1 = ScalarExpr::constant(base, bd.g2);
    bd.f2 = ScalarExpr::constant(base, -bd.g1);
    bd.gamma = fourier_primitive(omega1 * bd.g1 + omega2 * bd.g2);

    Rational l = bd.g2 * I1 - bd.g1 * I2;  // = I1^2 + I2^2 != 0
    DifferentialForm volume(base, 2);
    volume.add_term({0, 1}, ScalarExpr::constant(base, Rational(1)));
    DifferentialForm exact_part = omega1 * bd.g2 - omega2 * bd.g1 - volume * l;
    bd.beta = fourier_primitive(exact_part);
    return bd;
}

struct LemmaVolumePair {
    ScalarExpr h;
    DifferentialForm beta;
    ScalarExpr volume_coefficient;  // of h d(beta) + beta ^ dh
    bool symbolic;                  // volume verified exactly (vs grid)
};

/// A function h vanishing exactly on the requested circles with alternating
/// signs, and a 1-form beta with h d(beta) + beta ^ dh a volume form.
/// Equally spaced circles admit the single-frequency choice, verified
/// symbolically (the volume coefficient is exactly 1); unequal spacings use a
/// product of half-angle sines with beta = h' dtheta1, verified on a grid.
inline LemmaVolumePair lemma_volume_pair(const SingularSetSpec& spec,
                                         const ChartPtr& base = torus_chart(2),
                                         const VerifyOptions& opt = {}) {
    if (spec.variant != SingularVariant::Circles)
        throw Error("lemma_volume_pair: spec must be the circles variant");
    const auto& levels = spec.circle_levels;
    const int count = static_cast<int>(levels.size());
    const int m = count / 2;

    bool equal_spaced = true;
    for (int i = 0; i + 1 < count; ++i)
        if (levels[i + 1] - levels[i] != Rational(1, m)) equal_spaced = false;

    ScalarExpr h = ScalarExpr::constant(base, Rational(0));
    DifferentialForm beta(base, 1);
    if (equal_spaced) {
        LinearArg arg;
        arg.add_coord(1, Rational(m));
        arg.pi_coeff = -Rational(m) * levels[0];
        h = ScalarExpr::sin_of(base, arg);
        beta.add_term({0}, ScalarExpr::constant(base, Rational(1, m)) *
                               ScalarExpr::cos_of(base, arg));
    } else {
        h = ScalarExpr::constant(base, Rational(1));
        for (const Rational& level : levels) {
            LinearArg arg;
            arg.add_coord(1, Rational(1, 2));
            arg.pi_coeff = -level / 2;
            h = h * ScalarExpr::sin_of(base, arg);
        }
        beta.add_term({0}, h.differentiate(1));
    }

    DifferentialForm vol = exterior_derivative(beta) * h +
                           wedge(beta, exterior_derivative(DifferentialForm::function(h)));
    LemmaVolumePair out{normalize(h), beta, normalize(vol.coefficient({0, 1})), false};

    if (equal_spaced) {
        ScalarExpr expected = ScalarExpr::constant(base, Rational(1));
        if (!is_zero(out.volume_coefficient - expected))
            throw Error("lemma_volume_pair: emitted pair failed the symbolic volume check");
        out.symbolic = true;
    } else {
        GridSpec grid(base, opt.grid_points);
        GridMin gm = grid_min_abs(grid, CompiledScalar(out.volume_coefficient));
        if (gm.min_abs <= opt.tol)
            throw Error("lemma_volume_pair: product ansatz volume vanishes on the grid "
                        "(min " + std::to_string(gm.min_abs) + "); spec not realizable here");
    }
    return out;
}

struct CirclesConstruction {
    BundleData data;
    Rational r{1};          // the beta scale actually used
    LemmaVolumePair lemma;
};

/// The circles construction: lemma pair, (g, gamma) from the class logic,
/// f_i = k_i h / (k1 g2 - k2 g1), then beta = r beta0 with r doubling until
/// cc1 clears the grid tolerance (cap 2^20).
inline CirclesConstruction construct_sigma_circles(const SingularSetSpec& spec,
                                                   const DifferentialForm& omega1,
                                                   const DifferentialForm& omega2,
                                                   const Rational& k1, const Rational& k2,
                                                   const VerifyOptions& opt = {}) {
    require_same_chart(omega1.chart(), omega2.chart(), "construct_sigma_circles");
    const ChartPtr& base = omega1.chart();
    LemmaVolumePair lemma = lemma_volume_pair(spec, base, opt);

    BundleData bd = BundleData::flat(base);
    bd.omega1 = omega1;
    bd.omega2 = omega2;

    Rational I1 = integrate_torus(omega1.coefficient({0, 1})).coefficient;
    Rational I2 = integrate_torus(omega2.coefficient({0, 1})).coefficient;
    if (I1 == 0 && I2 == 0) {
        bd.g1 = 0;
        bd.g2 = 1;
    } else {
        bd.g1 = -I2;
        bd.g2 = I1;
    }
    bd.gamma = fourier_primitive(omega1 * bd.g1 + omega2 * bd.g2);

    Rational D = k1 * bd.g2 - k2 * bd.g1;
    if (D == 0)
        throw Error("construct_sigma_circles: k1 g2 - k2 g1 = 0 (the f_i ansatz divides by it)");
    ScalarExpr f = lemma.h * ScalarExpr::constant(base, 1 / D);
    bd.f1 = normalize(f * ScalarExpr::constant(base, k1));
    bd.f2 = normalize(f * ScalarExpr::constant(base, k2));

    Rational r(1);
    const Rational cap(1048576);  // 2^20
    while (true) {
        bd.beta = lemma.beta * r;
        BundleReport rep = check_conditions(bd, opt);
        if (rep.passed()) break;
        const ConditionResult* cc1 = rep.find("cc1_nonvanishing");
        bool only_cc1 = cc1 && !cc1->passed();
        for (const auto& c : rep.conditions)
            if (c.name != "cc1_nonvanishing" && !c.passed()) only_cc1 = false;
        if (!only_cc1)
            throw Error("construct_sigma_circles: construction failed a condition other "
                        "than cc1 (internal)");
        r *= 2;
        if (r > cap)
            throw Error("construct_sigma_circles: beta scale exceeded 2^20 without "
                        "clearing cc1");
    }

    // Singular-set match: the zero set of the emitted h must be exactly the
    // requested circles.
    SingularClassification cls = classify_singular_set(bd);
    bool match = false;
    if (cls.variant == SingularVariant::Circles) {
        if (!cls.levels.empty()) {
            match = cls.levels == spec.circle_levels;
        } else if (cls.levels_numeric.size() == spec.circle_levels.size()) {
            match = true;
            for (std::size_t i = 0; i < cls.levels_numeric.size(); ++i) {
                double want = to_double(spec.circle_levels[i]) * std::numbers::pi;
                if (std::abs(cls.levels_numeric[i] - want) > 0.05) match = false;
            }
        }
    }
    if (!match)
        throw Error("construct_sigma_circles: singular set of the output does not match "
                    "the requested circles (internal)");
    return {bd, r, lemma};
}

/// Flat-bundle assembly: when both curvature forms vanish the total space is
/// a global T^4 chart (theta1, theta2, phi1, phi2) and the invariant pair
/// becomes alpha = beta + f1 dphi1 + f2 dphi2, eta = gamma + g1 dphi1 +
/// g2 dphi2, handed to the Definition verifier as a type (1,0) pair.
inline ContactPair assemble_trivial_bundle_pair(const BundleData& bd) {
    bd.validate();
    if (!bd.omega1.is_zero_form() || !bd.omega2.is_zero_form())
        throw Error("assemble_trivial_bundle_pair: non-flat data cannot be realized on a "
                    "single chart");
    std::vector<std::string> names = bd.base->names();
    names.push_back("phi1");
    names.push_back("phi2");
    ChartPtr total = make_chart(names, std::vector<bool>(4, true));

    std::vector<ScalarExpr> lift_repl = {ScalarExpr::coordinate(total, 0),
                                         ScalarExpr::coordinate(total, 1)};
    auto lift_scalar = [&](const ScalarExpr& e) { return e.substitute(lift_repl, total); };
    auto lift_form = [&](const DifferentialForm& f) {
        DifferentialForm r(total, f.degree());
        for (const auto& [t, c] : f.coefficients()) r.add_term(t, lift_scalar(c));
        return r;
    };

    DifferentialForm alpha = lift_form(bd.beta);
    alpha.add_term({2}, lift_scalar(bd.f1));
    alpha.add_term({3}, lift_scalar(bd.f2));
    DifferentialForm eta = lift_form(bd.gamma);
    eta.add_term({2}, ScalarExpr::constant(total, bd.g1));
    eta.add_term({3}, ScalarExpr::constant(total, bd.g2));
    return ContactPair(std::move(alpha), std::move(eta), 1, 0);
}

/// Best-effort irrationality flag for the periods of a constant-coefficient
/// closed 1-form: a ratio mixing a pure rational with a pure rational
/// multiple of pi is irrational; rational/rational is rational; anything
/// else is unknown.
inline std::string period_ratio_note(const DifferentialForm& form) {
    if (form.degree() != 1) return "unknown";
    bool saw_rational = false, saw_pi = false, saw_other = false;
    int nonzero = 0;
    for (const auto& [t, c] : form.coefficients()) {
        const NormalForm& nf = c.normal_form();
        if (!nf.is_constant()) return "unknown";
        ++nonzero;
        if (nf.rational_constant()) {
            saw_rational = true;
            continue;
        }
        auto groups = nf.groups();
        if (groups.size() == 1 && groups.begin()->first.first.pi_pow == 1 &&
            groups.begin()->first.second.zero() && groups.begin()->second.size() == 1 &&
            groups.begin()->second.begin()->first == 0)
            saw_pi = true;
        else
            saw_other = true;
    }
    if (nonzero < 2) return "rational";
    if (saw_other) return "unknown";
    if (saw_rational && saw_pi) return "irrational";
    return "rational";
}

}  // namespace cpair
