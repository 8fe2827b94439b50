#pragma once

#include "cpair/contact_pair.hpp"
#include "cpair/lie_algebra.hpp"
#include "cpair/torus_bundle.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpair {

using Json = nlohmann::json;

/// Manifest/input problems map to CLI exit code 2 (check failures are 1).
class ManifestError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// JSON (de)serialization of the core objects.
// ---------------------------------------------------------------------------

inline DifferentialForm form_from_json(const Json& j, const ChartPtr& chart) {
    if (!j.contains("degree") || !j.contains("terms"))
        throw ManifestError("form: need 'degree' and 'terms'");
    DifferentialForm f(chart, j.at("degree").get<int>());
    for (const Json& term : j.at("terms")) {
        IndexTuple t;
        for (int i : term.at("idx").get<std::vector<int>>()) t.push_back(i - 1);
        try {
            f.add_term(t, parse_expr(term.at("coef").get<std::string>(), chart));
        } catch (const Error& e) {
            throw ManifestError(std::string("form term: ") + e.what());
        }
    }
    return f;
}

inline Json form_to_json(const DifferentialForm& f) {
    Json terms = Json::array();
    for (const auto& [t, c] : f.coefficients()) {
        Json idx = Json::array();
        for (int i : t) idx.push_back(i + 1);
        terms.push_back({{"idx", idx}, {"coef", normalize(c).to_string()}});
    }
    return Json{{"degree", f.degree()}, {"terms", terms}};
}

inline LieAlgebra algebra_from_json(const Json& j) {
    if (!j.contains("dim")) throw ManifestError("algebra: need 'dim'");
    LieAlgebra g(j.at("dim").get<int>());
    for (const Json& b : j.value("brackets", Json::array())) {
        int i = b.at("i").get<int>() - 1;
        int jj = b.at("j").get<int>() - 1;
        for (const Json& r : b.at("result"))
            g.set_bracket(i, jj, r.at("k").get<int>() - 1,
                          parse_rational(r.at("c").is_string()
                                             ? r.at("c").get<std::string>()
                                             : std::to_string(r.at("c").get<long long>())));
    }
    return g;
}

inline Json condition_to_json(const ConditionResult& c) {
    Json j{{"name", c.name}, {"status", status_name(c.status)}};
    if (c.min_abs) j["min_abs"] = *c.min_abs;
    if (c.argmin) j["argmin"] = *c.argmin;
    if (c.residual) j["residual"] = *c.residual;
    if (c.note) j["note"] = *c.note;
    return j;
}

// ---------------------------------------------------------------------------
// Manifest.
// ---------------------------------------------------------------------------

struct Manifest {
    ChartPtr chart;
    std::map<std::string, DifferentialForm> forms;
    std::map<std::string, ChartMap> maps;
    std::map<std::string, CurveSpec> curves;

    struct PairDecl {
        std::string alpha, eta;
        int h = 0, k = 0;
    };
    std::optional<PairDecl> pair;

    std::optional<LieAlgebra> algebra;
    struct InvariantPairDecl {
        int alpha_index = 0, eta_index = 0;  // 1-based dual-basis indices
        int h = 0, k = 0;
    };
    std::optional<InvariantPairDecl> invariant_pair;

    std::vector<Json> checks;
    int grid = 17;
    double tol = 1e-9;
    std::uint64_t seed = 42;

    const DifferentialForm& form(const std::string& name) const {
        auto it = forms.find(name);
        if (it == forms.end()) throw ManifestError("unknown form '" + name + "'");
        return it->second;
    }
    const ChartMap& map(const std::string& name) const {
        auto it = maps.find(name);
        if (it == maps.end()) throw ManifestError("unknown map '" + name + "'");
        return it->second;
    }
    const CurveSpec& curve(const std::string& name) const {
        auto it = curves.find(name);
        if (it == curves.end()) throw ManifestError("unknown curve '" + name + "'");
        return it->second;
    }

    ContactPair make_pair() const {
        if (!pair) throw ManifestError("manifest declares no pair");
        try {
            return ContactPair(form(pair->alpha), form(pair->eta), pair->h, pair->k);
        } catch (const ManifestError&) {
            throw;
        } catch (const Error& e) {
            throw ManifestError(e.what());
        }
    }
};

/// Evaluates a constant expression of the form q or q*pi (used for curve
/// interval endpoints given as expression strings).
inline double constant_value_of(const std::string& text, const ChartPtr& chart) {
    ScalarExpr e = parse_expr(text, chart);
    if (!is_constant(e)) throw ManifestError("expected a constant: '" + text + "'");
    return e.evaluate(Point(chart, std::vector<double>(chart->dimension(), 0.0)));
}

inline Manifest manifest_from_json(const Json& j) {
    Manifest m;
    try {
        if (j.contains("chart")) {
            const Json& c = j.at("chart");
            m.chart = make_chart(c.at("names").get<std::vector<std::string>>(),
                                 c.at("periodic").get<std::vector<bool>>());
        }
        if (j.contains("forms")) {
            if (!m.chart) throw ManifestError("forms need a chart");
            for (const auto& [name, fj] : j.at("forms").items()) {
                DifferentialForm f = form_from_json(fj, m.chart);
                for (const auto& [t, coef] : f.coefficients())
                    validate_periodic_frequencies(coef);
                m.forms.emplace(name, std::move(f));
            }
        }
        if (j.contains("maps")) {
            if (!m.chart) throw ManifestError("maps need a chart");
            for (const auto& [name, mj] : j.at("maps").items()) {
                std::vector<ScalarExpr> comps;
                for (const std::string& s : mj.get<std::vector<std::string>>())
                    comps.push_back(parse_expr(s, m.chart));
                ChartMap map(m.chart, m.chart, std::move(comps));
                map.validate_torus_map();
                m.maps.emplace(name, std::move(map));
            }
        }
        if (j.contains("curves")) {
            if (!m.chart) throw ManifestError("curves need a chart");
            for (const auto& [name, cj] : j.at("curves").items()) {
                auto comps = cj.at("components").get<std::vector<std::string>>();
                double t0 = 0, t1 = 1;
                if (cj.contains("interval")) {
                    const Json& iv = cj.at("interval");
                    auto endpoint = [&](const Json& v) {
                        ChartPtr param = make_chart({"t"}, {false});
                        return v.is_string() ? constant_value_of(v.get<std::string>(), param)
                                             : v.get<double>();
                    };
                    t0 = endpoint(iv.at(0));
                    t1 = endpoint(iv.at(1));
                }
                m.curves.emplace(name, CurveSpec(m.chart, comps, t0, t1));
            }
        }
        if (j.contains("pair")) {
            const Json& p = j.at("pair");
            m.pair = Manifest::PairDecl{p.at("alpha").get<std::string>(),
                                        p.at("eta").get<std::string>(), p.at("h").get<int>(),
                                        p.at("k").get<int>()};
            m.make_pair();  // fail fast on shape problems
        }
        if (j.contains("algebra")) m.algebra = algebra_from_json(j.at("algebra"));
        if (j.contains("invariant_pair")) {
            const Json& p = j.at("invariant_pair");
            m.invariant_pair = Manifest::InvariantPairDecl{
                p.at("alpha").get<int>(), p.at("eta").get<int>(), p.at("h").get<int>(),
                p.at("k").get<int>()};
        }
        for (const Json& c : j.value("checks", Json::array())) m.checks.push_back(c);
        m.grid = j.value("grid", 17);
        m.tol = j.value("tol", 1e-9);
        m.seed = j.value("seed", std::uint64_t{42});
    } catch (const ManifestError&) {
        throw;
    } catch (const std::exception& e) {
        throw ManifestError(std::string("manifest: ") + e.what());
    }
    return m;
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ManifestError(std::string("manifest JSON: ") + e.what());
    }
    return manifest_from_json(j);
}

// ---------------------------------------------------------------------------
// Check runners. Every requested check lands in the report; nothing is
// silently skipped (a check that cannot run is an input error).
// ---------------------------------------------------------------------------

struct RunOutcome {
    Json report = Json::object();
    bool all_passed = true;
    std::vector<std::string> lines;  // human-readable summary

    void add_conditions(const std::string& section, const std::vector<ConditionResult>& cs) {
        Json arr = Json::array();
        for (const auto& c : cs) {
            arr.push_back(condition_to_json(c));
            all_passed = all_passed && c.passed();
            lines.push_back("  [" + std::string(c.passed() ? "pass" : "FAIL") + "] " + section +
                            "/" + c.name +
                            (c.note ? " (" + *c.note + ")" : std::string()) +
                            (c.residual ? " residual: " + *c.residual : std::string()));
        }
        if (!report.contains("conditions")) report["conditions"] = Json::array();
        for (auto& e : arr) report["conditions"].push_back(e);
    }
};

inline std::vector<Point> seeded_points(const ChartPtr& chart, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) pts.push_back(random_point(chart, rng));
    return pts;
}

inline void run_check_verify(const Manifest& m, const ContactPair& cp, RunOutcome& out) {
    VerifyOptions opt{m.grid, m.tol, m.seed};
    VerificationReport rep = verify(cp, opt);
    out.add_conditions("verify", rep.conditions);
    out.report["region"] = rep.region;
}

inline void run_check_reeb(const Manifest& m, const ContactPair& cp, RunOutcome& out) {
    (void)m;
    ReebPair rp = reeb_fields(cp);
    Json reeb;
    auto render = [&](const ReebField& f) {
        Json comps = Json::array();
        const VectorField& v = f.is_exact() ? f.field() : f.raw;
        for (const auto& c : v.components()) comps.push_back(normalize(c).to_string());
        return comps;
    };
    reeb["alpha"] = render(rp.alpha_field);
    reeb["eta"] = render(rp.eta_field);
    reeb["exact"] = rp.exact();
    if (!rp.alpha_field.is_exact())
        reeb["alpha_scale"] = normalize(rp.alpha_field.scale).to_string();
    if (!rp.eta_field.is_exact())
        reeb["eta_scale"] = normalize(rp.eta_field.scale).to_string();
    out.report["reeb"] = reeb;
    out.lines.push_back("  reeb fields computed (exact=" +
                        std::string(rp.exact() ? "true" : "false") + ")");
}

inline void run_check_reeb_properties(const Manifest& m, const ContactPair& cp,
                                      RunOutcome& out) {
    (void)m;
    ReebPair rp = reeb_fields(cp);
    ReebPropertyReport rep = check_reeb_properties(cp, rp);
    out.add_conditions("reeb_properties", rep.conditions);
}

inline void run_check_flow_invariance(const Manifest& m, const ContactPair& cp,
                                      RunOutcome& out, int probes = 10, double time = 0.1,
                                      double step = 1e-3, double tol = 1e-6) {
    ReebPair rp = reeb_fields(cp);
    auto pts = seeded_points(cp.chart(), probes, m.seed);
    ConditionResult c;
    for (const auto& [name, field] :
         std::vector<std::pair<std::string, const ReebField*>>{{"X_alpha", &rp.alpha_field},
                                                               {"X_eta", &rp.eta_field}}) {
        FlowTransportReport fr = flow_transport_check(cp, *field, pts, time, step);
        ConditionResult cc;
        cc.name = "flow_invariance_" + name;
        cc.min_abs = fr.max_deviation;
        cc.status = fr.passed(tol) ? CheckStatus::NumericPass : CheckStatus::NumericFail;
        cc.note = "max transport deviation " + std::to_string(fr.max_deviation);
        out.add_conditions("flow", {cc});
    }
}

inline void run_check_distributions(const Manifest& m, const ContactPair& cp, RunOutcome& out,
                                    int points = 50) {
    auto pts = seeded_points(cp.chart(), points, m.seed);
    auto check_side = [&](const DifferentialForm& f, int expect, const std::string& name) {
        ConditionResult c;
        c.name = name;
        c.status = CheckStatus::NumericPass;
        for (const Point& p : pts) {
            DistributionBasis b = characteristic_distribution(f, p);
            if (b.dimension != expect) {
                c.status = CheckStatus::NumericFail;
                c.argmin = p.values();
                c.residual = "dimension " + std::to_string(b.dimension) + ", expected " +
                             std::to_string(expect);
                break;
            }
        }
        c.note = "expected dimension " + std::to_string(expect) + " at " +
                 std::to_string(points) + " points";
        return c;
    };
    out.add_conditions("distributions",
                       {check_side(cp.alpha(), 2 * cp.k() + 1, "ker_alpha_dimension"),
                        check_side(cp.eta(), 2 * cp.h() + 1, "ker_eta_dimension")});
}

inline void run_check_involutivity(const Manifest& m, const ContactPair& cp, const Json& spec,
                                   RunOutcome& out) {
    if (!spec.contains("frame"))
        throw ManifestError("involutivity check: no frame available");
    std::vector<VectorField> frame;
    for (const Json& field : spec.at("frame")) {
        std::vector<ScalarExpr> comps;
        for (const std::string& s : field.get<std::vector<std::string>>())
            comps.push_back(parse_expr(s, m.chart));
        frame.emplace_back(m.chart, std::move(comps));
    }
    auto pts = seeded_points(cp.chart(), spec.value("points", 20), m.seed);
    InvolutivityReport rep = involutivity_check(frame, pts);
    ConditionResult c;
    c.name = "involutivity_" + spec.value("which", std::string("frame"));
    c.min_abs = rep.max_residual;
    c.status = rep.passed(m.tol) ? CheckStatus::NumericPass : CheckStatus::NumericFail;
    c.note = "max re-expansion residual " + std::to_string(rep.max_residual) + " over " +
             std::to_string(rep.pairs_checked) + " bracket pairs";
    out.add_conditions("involutivity", {c});
}

inline void run_check_legendrian(const Manifest& m, const ContactPair& cp, const Json& spec,
                                 RunOutcome& out) {
    const CurveSpec& curve = m.curve(spec.at("curve").get<std::string>());
    std::string wrt = spec.value("wrt", std::string("alpha"));
    PairSide side = wrt == "eta" ? PairSide::Eta : PairSide::Alpha;
    LegendrianReport rep =
        legendrian_check(cp, curve, side, spec.value("samples", 32), m.tol);
    ConditionResult tang = rep.tangency;
    tang.name = "legendrian_tangency[" + spec.at("curve").get<std::string>() + "," + wrt + "]";
    ConditionResult trans = rep.transversality;
    trans.name = "legendrian_transversality[" + spec.at("curve").get<std::string>() + "," + wrt + "]";
    out.add_conditions("legendrian", {tang, trans});
}

inline ConditionResult pullback_invariance_condition(const std::string& name,
                                                     const ChartMap& phi,
                                                     const DifferentialForm& form) {
    DifferentialForm diff = pullback(phi, form) - form;
    ConditionResult c = detail::symbolic_zero_condition(name, diff);
    return c;
}

inline void run_check_pullback(const Manifest& m, const Json& spec, RunOutcome& out) {
    std::string map_name = spec.at("map").get<std::string>();
    std::string form_name = spec.at("form").get<std::string>();
    out.add_conditions("pullback",
                       {pullback_invariance_condition("pullback_invariance[" + map_name + "," +
                                                          form_name + "]",
                                                      m.map(map_name), m.form(form_name))});
}

inline void run_check_jacobi(const Manifest& m, RunOutcome& out) {
    if (!m.algebra) throw ManifestError("jacobi check: no algebra in manifest");
    ConditionResult c;
    c.name = "jacobi";
    c.status = check_jacobi(*m.algebra) ? CheckStatus::SymbolicPass : CheckStatus::SymbolicFail;
    out.add_conditions("algebra", {c});
}

inline void run_check_nilpotent(const Manifest& m, RunOutcome& out) {
    if (!m.algebra) throw ManifestError("nilpotent check: no algebra in manifest");
    NilpotencyResult nr = is_nilpotent(*m.algebra);
    ConditionResult c;
    c.name = "nilpotent";
    c.status = nr.nilpotent ? CheckStatus::SymbolicPass : CheckStatus::SymbolicFail;
    c.note = "lower central series steps: " + std::to_string(nr.steps);
    out.add_conditions("algebra", {c});
}

inline void run_check_invariant_cp(const Manifest& m, RunOutcome& out) {
    if (!m.algebra || !m.invariant_pair)
        throw ManifestError("invariant_cp check: need algebra and invariant_pair");
    const auto& p = *m.invariant_pair;
    const int n = m.algebra->dimension();
    InvariantCpReport rep = invariant_cp_check(
        *m.algebra, InvariantForm::covector(n, p.alpha_index - 1),
        InvariantForm::covector(n, p.eta_index - 1), p.h, p.k);
    std::vector<ConditionResult> cs;
    auto mk = [](const std::string& name, bool ok) {
        ConditionResult c;
        c.name = name;
        c.status = ok ? CheckStatus::SymbolicPass : CheckStatus::SymbolicFail;
        return c;
    };
    cs.push_back(mk("jacobi", rep.jacobi));
    cs.push_back(mk("d_alpha_power_closed", rep.alpha_power_closed));
    cs.push_back(mk("d_eta_power_closed", rep.eta_power_closed));
    ConditionResult vol = mk("volume", rep.volume_nonzero);
    vol.note = "volume constant " + cpair::to_string(rep.volume_constant);
    cs.push_back(vol);
    out.add_conditions("invariant_cp", cs);
    out.report["volume_constant"] = cpair::to_string(rep.volume_constant);
}

/// Runs the manifest's check list. Throws ManifestError for malformed
/// requests; check failures are recorded in the outcome.
inline RunOutcome run_manifest_checks(const Manifest& m) {
    RunOutcome out;
    out.report["seed"] = m.seed;
    out.report["grid"] = m.grid;
    out.report["tol"] = m.tol;
    if (m.pair) out.report["pair"] = m.pair->alpha + "," + m.pair->eta;

    std::optional<ContactPair> cp;
    auto need_pair = [&]() -> const ContactPair& {
        if (!cp) cp = m.make_pair();
        return *cp;
    };

    if (m.checks.empty()) throw ManifestError("manifest lists no checks");
    for (const Json& c : m.checks) {
        std::string type = c.is_string() ? c.get<std::string>()
                                         : c.at("type").get<std::string>();
        if (type == "verify") {
            run_check_verify(m, need_pair(), out);
        } else if (type == "reeb") {
            run_check_reeb(m, need_pair(), out);
        } else if (type == "reeb_properties") {
            run_check_reeb_properties(m, need_pair(), out);
        } else if (type == "flow_invariance") {
            run_check_flow_invariance(m, need_pair(), out);
        } else if (type == "distributions") {
            run_check_distributions(m, need_pair(), out);
        } else if (type == "involutivity") {
            run_check_involutivity(m, need_pair(), c.is_object() ? c : Json::object(), out);
        } else if (type == "legendrian") {
            run_check_legendrian(m, need_pair(), c, out);
        } else if (type == "pullback") {
            run_check_pullback(m, c, out);
        } else if (type == "jacobi") {
            run_check_jacobi(m, out);
        } else if (type == "nilpotent") {
            run_check_nilpotent(m, out);
        } else if (type == "invariant_cp") {
            run_check_invariant_cp(m, out);
        } else {
            throw ManifestError("unknown check type '" + type + "'");
        }
    }
    return out;
}

}  // namespace cpair
