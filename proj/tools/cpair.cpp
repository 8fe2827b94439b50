// Command-line front end: manifest-driven verification, the example catalog,
// and the torus-bundle constructors. Exit codes: 0 all checks pass, 1 a check
// failed, 2 input error.

#include "cpair/catalog.hpp"
#include "cpair/manifest.hpp"

#include <CLI11.hpp>

#include <ctime>
#include <fstream>
#include <iostream>

namespace {

using cpair::Json;

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

struct OutputOptions {
    std::string report_path;
    bool quiet = false;
};

int emit(const cpair::RunOutcome& out, const OutputOptions& oo) {
    if (!oo.quiet) {
        for (const auto& line : out.lines) std::cout << line << "\n";
        std::cout << (out.all_passed ? "PASS" : "FAIL") << "\n";
    }
    if (!oo.report_path.empty()) {
        Json envelope;
        envelope["header"] = {{"tool", "cpair"},
                              {"version", "0.1.0"},
                              {"timestamp", utc_timestamp()}};
        envelope["report"] = out.report;
        std::ofstream f(oo.report_path);
        if (!f) {
            std::cerr << "cannot write report to '" << oo.report_path << "'\n";
            return 2;
        }
        f << envelope.dump(2) << "\n";
    }
    return out.all_passed ? 0 : 1;
}

Json load_form_json_arg(const std::string& arg) {
    if (arg.empty()) return Json();
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return Json::parse(arg);
    std::ifstream f(arg);
    if (!f) throw cpair::ManifestError("cannot open form file '" + arg + "'");
    Json j;
    f >> j;
    return j;
}

Json bundle_to_json(const cpair::BundleData& bd) {
    Json j;
    j["base"] = {{"names", bd.base->names()},
                 {"periodic", std::vector<bool>(bd.base->dimension(), true)}};
    j["beta"] = cpair::form_to_json(bd.beta);
    j["gamma"] = cpair::form_to_json(bd.gamma);
    j["f1"] = cpair::normalize(bd.f1).to_string();
    j["f2"] = cpair::normalize(bd.f2).to_string();
    j["g1"] = cpair::to_string(bd.g1);
    j["g2"] = cpair::to_string(bd.g2);
    j["omega1"] = cpair::form_to_json(bd.omega1);
    j["omega2"] = cpair::form_to_json(bd.omega2);
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-numeric toolkit for contact pairs on coordinate charts"};
    app.require_subcommand(1);
    app.fallthrough();

    int grid = 17;
    double tol = 1e-9;
    std::uint64_t seed = 42;
    OutputOptions oo;
    app.add_option("--grid", grid, "grid points per axis")->capture_default_str();
    app.add_option("--tol", tol, "numeric tolerance")->capture_default_str();
    app.add_option("--seed", seed, "PRNG seed recorded in reports")->capture_default_str();
    app.add_option("--report", oo.report_path, "write a JSON report to this path");
    app.add_flag("--quiet", oo.quiet, "suppress the text summary");

    auto* cmd_verify = app.add_subcommand("verify", "run the checks listed in a manifest");
    std::string verify_manifest;
    cmd_verify->add_option("manifest", verify_manifest, "manifest JSON path")->required();

    auto* cmd_catalog = app.add_subcommand("catalog", "list or run built-in examples");
    std::string catalog_action, catalog_id;
    cmd_catalog->add_option("action", catalog_action, "'list' or 'run'")->required();
    cmd_catalog->add_option("id", catalog_id, "catalog id for 'run'");

    auto* cmd_construct =
        app.add_subcommand("construct", "build an invariant bundle pair for a singular set");
    std::string ccase, circles = "0,pi", omega1_arg, omega2_arg, out_path = "bundle.json";
    std::string k1s = "1", k2s = "0";
    cmd_construct->add_option("--case", ccase, "full | empty | circles")->required();
    cmd_construct->add_option("--circles", circles, "circle levels, e.g. \"0,pi\"")
        ->capture_default_str();
    cmd_construct->add_option("--omega1", omega1_arg, "curvature 2-form (inline JSON or path)");
    cmd_construct->add_option("--omega2", omega2_arg, "curvature 2-form (inline JSON or path)");
    cmd_construct->add_option("--k1", k1s, "rational constant k1")->capture_default_str();
    cmd_construct->add_option("--k2", k2s, "rational constant k2")->capture_default_str();
    cmd_construct->add_option("--out", out_path, "output JSON path")->capture_default_str();

    auto* cmd_pullback =
        app.add_subcommand("pullback-check", "check f*omega = omega for a manifest map/form");
    std::string pb_manifest, pb_map, pb_form;
    cmd_pullback->add_option("manifest", pb_manifest)->required();
    cmd_pullback->add_option("--map", pb_map)->required();
    cmd_pullback->add_option("--form", pb_form)->required();

    auto* cmd_legendrian =
        app.add_subcommand("legendrian", "check a manifest curve for the Legendrian conditions");
    std::string lg_manifest, lg_curve, lg_wrt = "alpha";
    int lg_samples = 32;
    cmd_legendrian->add_option("manifest", lg_manifest)->required();
    cmd_legendrian->add_option("--curve", lg_curve)->required();
    cmd_legendrian->add_option("--wrt", lg_wrt, "alpha | eta")->capture_default_str();
    cmd_legendrian->add_option("--samples", lg_samples)->capture_default_str();

    auto* cmd_reeb =
        app.add_subcommand("reeb", "compute the Reeb fields of a manifest pair and check them");
    std::string reeb_manifest;
    cmd_reeb->add_option("manifest", reeb_manifest)->required();

    CLI11_PARSE(app, argc, argv);

    cpair::VerifyOptions vopt{grid, tol, seed};

    try {
        if (*cmd_verify) {
            cpair::Manifest m = cpair::load_manifest(verify_manifest);
            m.grid = grid;
            m.tol = tol;
            m.seed = seed;
            if (m.checks.empty()) m.checks.push_back(Json("verify"));
            return emit(cpair::run_manifest_checks(m), oo);
        }
        if (*cmd_catalog) {
            if (catalog_action == "list") {
                for (const auto& e : cpair::example_catalog())
                    std::cout << e.id << "  -  " << e.description << "\n";
                return 0;
            }
            if (catalog_action == "run") {
                if (catalog_id.empty()) throw cpair::ManifestError("catalog run: missing id");
                return emit(cpair::run_catalog_entry(catalog_id, vopt), oo);
            }
            throw cpair::ManifestError("catalog: action must be 'list' or 'run'");
        }
        if (*cmd_construct) {
            cpair::ChartPtr base = cpair::torus_chart(2);
            auto load_form = [&](const std::string& arg) {
                if (arg.empty()) return cpair::DifferentialForm::zero(base, 2);
                return cpair::form_from_json(load_form_json_arg(arg), base);
            };
            cpair::DifferentialForm o1 = load_form(omega1_arg), o2 = load_form(omega2_arg);
            cpair::RunOutcome out;
            cpair::BundleData bd = cpair::BundleData::flat(base);
            cpair::Rational used_r(1);
            if (ccase == "full") {
                bd = cpair::construct_sigma_full(base);
            } else if (ccase == "empty") {
                bd = cpair::construct_sigma_empty(o1, o2);
            } else if (ccase == "circles") {
                auto spec =
                    cpair::SingularSetSpec::circles(cpair::parse_circle_levels(circles));
                cpair::CirclesConstruction cc = cpair::construct_sigma_circles(
                    spec, o1, o2, cpair::parse_rational(k1s), cpair::parse_rational(k2s),
                    vopt);
                bd = cc.data;
                used_r = cc.r;
            } else {
                throw cpair::ManifestError("construct: --case must be full, empty or circles");
            }
            cpair::BundleReport rep = cpair::check_conditions(bd, vopt);
            out.add_conditions("bundle", rep.conditions);
            out.report["singular_variant"] = cpair::singular_variant_name(rep.singular_variant);
            out.report["r"] = cpair::to_string(used_r);
            out.report["bundle"] = bundle_to_json(bd);
            out.report["seed"] = seed;
            if (bd.omega1.is_zero_form() && bd.omega2.is_zero_form()) {
                cpair::ContactPair cp = cpair::assemble_trivial_bundle_pair(bd);
                out.add_conditions("assembled_verify", cpair::verify(cp, vopt).conditions);
            }
            if (!oo.report_path.empty()) {
                OutputOptions extra = oo;
                extra.quiet = true;
                emit(out, extra);
            }
            OutputOptions construct_oo = oo;
            construct_oo.report_path = out_path;
            return emit(out, construct_oo);
        }
        if (*cmd_pullback) {
            cpair::Manifest m = cpair::load_manifest(pb_manifest);
            m.grid = grid;
            m.tol = tol;
            m.seed = seed;
            m.checks = {Json{{"type", "pullback"}, {"map", pb_map}, {"form", pb_form}}};
            return emit(cpair::run_manifest_checks(m), oo);
        }
        if (*cmd_legendrian) {
            cpair::Manifest m = cpair::load_manifest(lg_manifest);
            m.grid = grid;
            m.tol = tol;
            m.seed = seed;
            m.checks = {Json{{"type", "legendrian"},
                             {"curve", lg_curve},
                             {"wrt", lg_wrt},
                             {"samples", lg_samples}}};
            return emit(cpair::run_manifest_checks(m), oo);
        }
        if (*cmd_reeb) {
            cpair::Manifest m = cpair::load_manifest(reeb_manifest);
            m.grid = grid;
            m.tol = tol;
            m.seed = seed;
            m.checks = {Json("reeb"), Json("reeb_properties")};
            return emit(cpair::run_manifest_checks(m), oo);
        }
    } catch (const cpair::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
