#pragma once

#include "cpair/manifest.hpp"

#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace cpair {

// ---------------------------------------------------------------------------
// Builders for the built-in examples (shared by the catalog and the tests).
// ---------------------------------------------------------------------------

inline ChartPtr t4_product_chart() {
    return make_chart({"theta1", "theta2", "theta3", "phi"}, {true, true, true, true});
}

/// alpha = sin(theta3) dtheta1 - cos(theta3) dtheta2, eta = dphi on T^4,
/// type (1,0).
inline ContactPair t4_product_pair() {
    ChartPtr c = t4_product_chart();
    DifferentialForm alpha(c, 1);
    alpha.add_term({0}, parse_expr("sin(theta3)", c));
    alpha.add_term({1}, parse_expr("-cos(theta3)", c));
    DifferentialForm eta(c, 1);
    eta.add_term({3}, parse_expr("1", c));
    return ContactPair(std::move(alpha), std::move(eta), 1, 0);
}

/// omega = cos(theta3) dtheta1 + sin(theta3) dtheta2, eta = dtheta4 +
/// lambda dtheta1 on T^4, type (1,0). The eta-coefficient lambda is rational
/// here; the top-form coefficient reduces to a non-zero constant for every
/// lambda, so verification is symbolic.
inline ContactPair t4_irrational_pair(const Rational& lambda) {
    ChartPtr c = torus_chart(4);
    DifferentialForm alpha(c, 1);
    alpha.add_term({0}, parse_expr("cos(theta3)", c));
    alpha.add_term({1}, parse_expr("sin(theta3)", c));
    DifferentialForm eta(c, 1);
    eta.add_term({3}, parse_expr("1", c));
    eta.add_term({0}, ScalarExpr::constant(c, lambda));
    return ContactPair(std::move(alpha), std::move(eta), 1, 0);
}

/// omega_n = cos(n theta3) dtheta1 + sin(n theta3) dtheta2 on T^3.
inline DifferentialForm t3_omega_n(int n, const ChartPtr& c) {
    DifferentialForm w(c, 1);
    w.add_term({0}, parse_expr("cos(" + std::to_string(n) + "*theta3)", c));
    w.add_term({1}, parse_expr("sin(" + std::to_string(n) + "*theta3)", c));
    return w;
}

/// f_n(theta1, theta2, theta3) = (theta2, theta1, pi/2n - theta3).
inline ChartMap t3_map_fn(int n, const ChartPtr& c) {
    return ChartMap(c, c,
                    {parse_expr("theta2", c), parse_expr("theta1", c),
                     parse_expr("1/" + std::to_string(2 * n) + "*pi - theta3", c)});
}

/// The T^3 reflection (theta1, -theta2, -theta3).
inline ChartMap t3_reflection_map(const ChartPtr& c) {
    return ChartMap(c, c,
                    {parse_expr("theta1", c), parse_expr("-theta2", c),
                     parse_expr("-theta3", c)});
}

/// The five-term invariant contact form on T^5.
inline DifferentialForm t5_contact_form(const ChartPtr& c) {
    DifferentialForm w(c, 1);
    w.add_term({0}, parse_expr("sin(theta2)*cos(theta2)", c));
    w.add_term({1}, parse_expr("-sin(theta1)*cos(theta1)", c));
    w.add_term({2}, parse_expr("cos(theta1)*cos(theta2)", c));
    w.add_term({3}, parse_expr("sin(theta1)*cos(theta3) - sin(theta2)*sin(theta3)", c));
    w.add_term({4}, parse_expr("sin(theta1)*sin(theta3) + sin(theta2)*cos(theta3)", c));
    return w;
}

/// Its invariance diffeomorphism (pi - t1, -t2, pi/2 - t3, t5, t4).
inline ChartMap t5_map(const ChartPtr& c) {
    return ChartMap(c, c,
                    {parse_expr("pi - theta1", c), parse_expr("-theta2", c),
                     parse_expr("1/2*pi - theta3", c), parse_expr("theta5", c),
                     parse_expr("theta4", c)});
}

/// Tubular-neighborhood chart T^2 x (-1,1) with the germ form
/// eta~ = dtheta1 + t dtheta2 and the involution F_V = (theta1, pi - theta2,
/// -t) that preserves it.
inline ChartPtr fv_chart() { return make_chart({"theta1", "theta2", "t"}, {true, true, false}); }

inline DifferentialForm fv_eta_tilde(const ChartPtr& c) {
    DifferentialForm e(c, 1);
    e.add_term({0}, parse_expr("1", c));
    e.add_term({1}, parse_expr("t", c));
    return e;
}

inline ChartMap fv_map(const ChartPtr& c) {
    return ChartMap(c, c,
                    {parse_expr("theta1", c), parse_expr("pi - theta2", c),
                     parse_expr("-t", c)});
}

/// Parses a comma-separated list of rational multiples of pi ("0,pi",
/// "0,1/2*pi,pi,3/2*pi") into multiples-of-pi rationals.
inline std::vector<Rational> parse_circle_levels(const std::string& text) {
    ChartPtr scratch = make_chart({"u"}, {false});
    std::vector<Rational> levels;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        ScalarExpr e = normalize(parse_expr(token, scratch));
        auto terms = e.normal_form().real_terms();
        if (terms.empty()) {
            levels.push_back(Rational(0));
            continue;
        }
        if (terms.size() != 1 || terms[0].trig != RealTerm::Trig::None ||
            terms[0].mono.pi_pow != 1 || !terms[0].mono.powers.empty())
            throw Error("circle level '" + token + "' must be a rational multiple of pi");
        levels.push_back(terms[0].coef);
    }
    return levels;
}

// ---------------------------------------------------------------------------
// Catalog.
// ---------------------------------------------------------------------------

struct CatalogEntry {
    std::string id;
    std::string description;
    std::function<RunOutcome(const VerifyOptions&)> run;
};

namespace detail {

inline void contact_pair_suite(const ContactPair& cp, const VerifyOptions& opt,
                               RunOutcome& out) {
    VerificationReport rep = verify(cp, opt);
    out.add_conditions("verify", rep.conditions);
    out.report["region"] = rep.region;

    ReebPair rp = reeb_fields(cp);
    Json reeb;
    Json ca = Json::array(), ce = Json::array();
    const VectorField& xa = rp.alpha_field.is_exact() ? rp.alpha_field.field()
                                                      : rp.alpha_field.raw;
    const VectorField& xe = rp.eta_field.is_exact() ? rp.eta_field.field() : rp.eta_field.raw;
    for (const auto& c : xa.components()) ca.push_back(normalize(c).to_string());
    for (const auto& c : xe.components()) ce.push_back(normalize(c).to_string());
    reeb["alpha"] = ca;
    reeb["eta"] = ce;
    reeb["exact"] = rp.exact();
    out.report["reeb"] = reeb;

    out.add_conditions("reeb_properties", check_reeb_properties(cp, rp).conditions);

    std::mt19937_64 rng(opt.seed);
    std::vector<Point> pts;
    for (int i = 0; i < opt.sample_count; ++i) pts.push_back(random_point(cp.chart(), rng));
    auto dim_check = [&](const DifferentialForm& f, int expect, const std::string& name) {
        ConditionResult c;
        c.name = name;
        c.status = CheckStatus::NumericPass;
        for (const Point& p : pts) {
            DistributionBasis b = characteristic_distribution(f, p);
            if (b.dimension != expect) {
                c.status = CheckStatus::NumericFail;
                c.argmin = p.values();
                break;
            }
        }
        c.note = "expected " + std::to_string(expect);
        return c;
    };
    out.add_conditions("distributions",
                       {dim_check(cp.alpha(), 2 * cp.k() + 1, "ker_alpha_dimension"),
                        dim_check(cp.eta(), 2 * cp.h() + 1, "ker_eta_dimension")});
}

inline ConditionResult contact_volume_condition(const std::string& name,
                                                const DifferentialForm& omega, unsigned power,
                                                const VerifyOptions& opt) {
    DifferentialForm top =
        wedge(omega, form_power(exterior_derivative(omega), power));
    IndexTuple full(omega.chart()->dimension());
    for (int i = 0; i < omega.chart()->dimension(); ++i) full[i] = i;
    return detail::nonvanishing_condition(name, top.coefficient(full), opt);
}

}  // namespace detail

inline std::vector<CatalogEntry> example_catalog() {
    std::vector<CatalogEntry> entries;

    for (int h = 0; h <= 3; ++h)
        for (int k = 0; k <= 3 - h; ++k) {
            if (h == 0 && k == 0) continue;
            std::string id = "darboux:" + std::to_string(h) + "," + std::to_string(k);
            entries.push_back(
                {id,
                 "model pair on R^" + std::to_string(2 * h + 2 * k + 2) + ", type (" +
                     std::to_string(h) + "," + std::to_string(k) + ")",
                 [h, k](const VerifyOptions& opt) {
                     RunOutcome out;
                     detail::contact_pair_suite(darboux_pair(h, k), opt, out);
                     return out;
                 }});
        }

    entries.push_back({"t4_product", "product pair on T^4 with explicit Reeb fields",
                       [](const VerifyOptions& opt) {
                           RunOutcome out;
                           detail::contact_pair_suite(t4_product_pair(), opt, out);
                           return out;
                       }});

    entries.push_back(
        {"t4_irrational",
         "T^4 pair eta = dtheta4 + lambda dtheta1 (parameter: t4_irrational:<lambda>)",
         [](const VerifyOptions& opt) {
             RunOutcome out;
             ContactPair cp = t4_irrational_pair(Rational(1, 10));
             detail::contact_pair_suite(cp, opt, out);
             out.report["eta_periods"] = period_ratio_note(cp.eta());
             return out;
         }});

    for (const LieCatalogEntry& le : lie_catalog()) {
        entries.push_back({le.name, le.description, [le](const VerifyOptions&) {
                               RunOutcome out;
                               auto mk = [](const std::string& name, bool ok) {
                                   ConditionResult c;
                                   c.name = name;
                                   c.status = ok ? CheckStatus::SymbolicPass
                                                 : CheckStatus::SymbolicFail;
                                   return c;
                               };
                               NilpotencyResult nil = is_nilpotent(le.algebra);
                               const int n = le.algebra.dimension();
                               InvariantCpReport rep = invariant_cp_check(
                                   le.algebra, InvariantForm::covector(n, le.alpha_index - 1),
                                   InvariantForm::covector(n, le.eta_index - 1), le.h, le.k);
                               std::vector<ConditionResult> cs;
                               cs.push_back(mk("jacobi", rep.jacobi));
                               ConditionResult niln = mk("nilpotent", nil.nilpotent);
                               niln.note = "class " + std::to_string(nil.steps);
                               cs.push_back(niln);
                               cs.push_back(mk("d_alpha_power_closed", rep.alpha_power_closed));
                               cs.push_back(mk("d_eta_power_closed", rep.eta_power_closed));
                               ConditionResult vol = mk("volume", rep.volume_nonzero);
                               vol.note = "volume constant " +
                                          cpair::to_string(rep.volume_constant);
                               cs.push_back(vol);
                               out.add_conditions("invariant_cp", cs);
                               out.report["volume_constant"] =
                                   cpair::to_string(rep.volume_constant);
                               return out;
                           }});
    }

    for (int n = 1; n <= 3; ++n) {
        entries.push_back(
            {"t3_fn:" + std::to_string(n),
             "T^3 contact form omega_" + std::to_string(n) + " with its invariance map",
             [n](const VerifyOptions& opt) {
                 RunOutcome out;
                 ChartPtr c = torus_chart(3);
                 DifferentialForm w = t3_omega_n(n, c);
                 out.add_conditions(
                     "pullback", {pullback_invariance_condition("pullback_invariance",
                                                                t3_map_fn(n, c), w)});
                 out.add_conditions("contact",
                                    {detail::contact_volume_condition("contact_volume", w, 1,
                                                                      opt)});
                 return out;
             }});
    }

    entries.push_back({"t3_reflection", "T^3 contact form preserved by a reflection",
                       [](const VerifyOptions& opt) {
                           RunOutcome out;
                           ChartPtr c = torus_chart(3);
                           DifferentialForm w = t3_omega_n(1, c);
                           out.add_conditions(
                               "pullback",
                               {pullback_invariance_condition("pullback_invariance",
                                                              t3_reflection_map(c), w)});
                           out.add_conditions(
                               "contact", {detail::contact_volume_condition("contact_volume",
                                                                            w, 1, opt)});
                           return out;
                       }});

    entries.push_back({"t5_contact", "five-term contact form on T^5 with its invariance map",
                       [](const VerifyOptions& opt) {
                           RunOutcome out;
                           ChartPtr c = torus_chart(5);
                           DifferentialForm w = t5_contact_form(c);
                           out.add_conditions(
                               "pullback",
                               {pullback_invariance_condition("pullback_invariance",
                                                              t5_map(c), w)});
                           out.add_conditions(
                               "contact", {detail::contact_volume_condition("contact_volume",
                                                                            w, 2, opt)});
                           return out;
                       }});

    entries.push_back({"fv_germ",
                       "germ form dtheta1 + t dtheta2 preserved by the tubular involution",
                       [](const VerifyOptions&) {
                           RunOutcome out;
                           ChartPtr c = fv_chart();
                           out.add_conditions(
                               "pullback",
                               {pullback_invariance_condition("pullback_invariance", fv_map(c),
                                                              fv_eta_tilde(c))});
                           return out;
                       }});

    entries.push_back(
        {"bundle_full", "invariant pair with singular set = whole base (flat bundle)",
         [](const VerifyOptions& opt) {
             RunOutcome out;
             BundleData bd = construct_sigma_full();
             BundleReport rep = check_conditions(bd, opt);
             out.add_conditions("bundle", rep.conditions);
             out.report["singular_variant"] = singular_variant_name(rep.singular_variant);
             ContactPair cp = assemble_trivial_bundle_pair(bd);
             out.add_conditions("assembled_verify", verify(cp, opt).conditions);
             return out;
         }});

    entries.push_back(
        {"bundle_empty",
         "invariant pair with empty singular set (needs a non-vanishing class)",
         [](const VerifyOptions& opt) {
             RunOutcome out;
             ChartPtr base = torus_chart(2);
             DifferentialForm o1(base, 2);
             o1.add_term({0, 1}, parse_expr("1", base));
             BundleData bd = construct_sigma_empty(o1, DifferentialForm::zero(base, 2));
             BundleReport rep = check_conditions(bd, opt);
             out.add_conditions("bundle", rep.conditions);
             out.report["singular_variant"] = singular_variant_name(rep.singular_variant);
             out.report["g1"] = cpair::to_string(bd.g1);
             out.report["g2"] = cpair::to_string(bd.g2);
             return out;
         }});

    entries.push_back(
        {"bundle_circles",
         "invariant pair with singular circles (parameter: bundle_circles:<levels>)",
         [](const VerifyOptions& opt) {
             RunOutcome out;
             ChartPtr base = torus_chart(2);
             auto spec = SingularSetSpec::circles({Rational(0), Rational(1)});
             CirclesConstruction cc =
                 construct_sigma_circles(spec, DifferentialForm::zero(base, 2),
                                         DifferentialForm::zero(base, 2), Rational(1),
                                         Rational(0), opt);
             BundleReport rep = check_conditions(cc.data, opt);
             out.add_conditions("bundle", rep.conditions);
             out.report["singular_variant"] = singular_variant_name(rep.singular_variant);
             out.report["r"] = cpair::to_string(cc.r);
             ContactPair cp = assemble_trivial_bundle_pair(cc.data);
             out.add_conditions("assembled_verify", verify(cp, opt).conditions);
             return out;
         }});

    return entries;
}

/// Executes a catalog id, with optional ":<args>" parameters for the
/// parameterized families (darboux:h,k | t3_fn:n | t4_irrational:lambda |
/// bundle_circles:levels).
inline RunOutcome run_catalog_entry(const std::string& id, const VerifyOptions& opt) {
    static const std::vector<CatalogEntry> entries = example_catalog();
    for (const auto& e : entries)
        if (e.id == id) {
            RunOutcome out = e.run(opt);
            out.report["catalog_id"] = id;
            return out;
        }

    auto split = id.find(':');
    std::string family = split == std::string::npos ? id : id.substr(0, split);
    std::string args = split == std::string::npos ? "" : id.substr(split + 1);

    if (family == "t4_irrational" && !args.empty()) {
        RunOutcome out;
        ContactPair cp = t4_irrational_pair(parse_rational(args));
        detail::contact_pair_suite(cp, opt, out);
        out.report["eta_periods"] = period_ratio_note(cp.eta());
        out.report["catalog_id"] = id;
        return out;
    }
    if (family == "darboux" && !args.empty()) {
        auto comma = args.find(',');
        if (comma != std::string::npos) {
            int h = std::stoi(args.substr(0, comma));
            int k = std::stoi(args.substr(comma + 1));
            RunOutcome out;
            detail::contact_pair_suite(darboux_pair(h, k), opt, out);
            out.report["catalog_id"] = id;
            return out;
        }
    }
    if (family == "t3_fn" && !args.empty()) {
        int n = std::stoi(args);
        if (n == 0) throw ManifestError("t3_fn: n must be non-zero");
        RunOutcome out;
        ChartPtr c = torus_chart(3);
        DifferentialForm w = t3_omega_n(n, c);
        out.add_conditions("pullback", {pullback_invariance_condition("pullback_invariance",
                                                                      t3_map_fn(n, c), w)});
        out.add_conditions("contact",
                           {detail::contact_volume_condition("contact_volume", w, 1, opt)});
        out.report["catalog_id"] = id;
        return out;
    }
    if (family == "bundle_circles" && !args.empty()) {
        RunOutcome out;
        ChartPtr base = torus_chart(2);
        auto spec = SingularSetSpec::circles(parse_circle_levels(args));
        CirclesConstruction cc = construct_sigma_circles(
            spec, DifferentialForm::zero(base, 2), DifferentialForm::zero(base, 2),
            Rational(1), Rational(0), opt);
        BundleReport rep = check_conditions(cc.data, opt);
        out.add_conditions("bundle", rep.conditions);
        out.report["singular_variant"] = singular_variant_name(rep.singular_variant);
        out.report["r"] = cpair::to_string(cc.r);
        ContactPair cp = assemble_trivial_bundle_pair(cc.data);
        out.add_conditions("assembled_verify", verify(cp, opt).conditions);
        out.report["catalog_id"] = id;
        return out;
    }
    throw ManifestError("unknown catalog id '" + id + "'");
}

}  // namespace cpair
