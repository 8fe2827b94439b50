#include "test_support.hpp"

#include "cpair/manifest.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

using namespace cpair;
using namespace testsupport;

namespace {

Json read_json(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    Json j;
    f >> j;
    return j;
}

std::string manifest_path(const std::string& name) {
#ifdef CPAIR_SOURCE_DIR
    return std::string(CPAIR_SOURCE_DIR) + "/manifests/" + name;
#else
    return "manifests/" + name;
#endif
}

}  // namespace

TEST_CASE("manifest: the T^4 product manifest passes all listed checks") {
    Manifest m = load_manifest(manifest_path("t4_product.json"));
    RunOutcome out = run_manifest_checks(m);
    CHECK(out.all_passed);
    CHECK(out.report.contains("reeb"));
    CHECK(out.report["reeb"]["exact"] == true);
    CHECK(out.report["reeb"]["alpha"][0] == "sin(theta3)");
}

TEST_CASE("manifest: deterministic reports for identical input and seed") {
    Manifest m1 = load_manifest(manifest_path("t4_product.json"));
    Manifest m2 = load_manifest(manifest_path("t4_product.json"));
    std::string r1 = run_manifest_checks(m1).report.dump();
    std::string r2 = run_manifest_checks(m2).report.dump();
    CHECK(r1 == r2);
}

TEST_CASE("manifest: the broken pair fails verification with a witness") {
    Manifest m = load_manifest(manifest_path("broken_pair.json"));
    RunOutcome out = run_manifest_checks(m);
    CHECK_FALSE(out.all_passed);
    bool saw_volume_fail = false;
    for (const auto& c : out.report["conditions"])
        if (c["name"] == "volume") {
            CHECK(c["status"] == "symbolic_fail");
            CHECK(c.contains("residual"));
            saw_volume_fail = true;
        }
    CHECK(saw_volume_fail);
}

TEST_CASE("manifest: shape violations are input errors") {
    Json j = read_json(manifest_path("t4_product.json"));
    j["pair"]["h"] = 2;  // 2h+2k+2 = 8 != 4
    CHECK_THROWS_AS(manifest_from_json(j), ManifestError);

    Json bad_check = read_json(manifest_path("t4_product.json"));
    bad_check["checks"] = Json::array({"definitely_not_a_check"});
    Manifest m = manifest_from_json(bad_check);
    CHECK_THROWS_AS(run_manifest_checks(m), ManifestError);

    Json no_checks = read_json(manifest_path("t4_product.json"));
    no_checks["checks"] = Json::array();
    CHECK_THROWS_AS(run_manifest_checks(manifest_from_json(no_checks)), ManifestError);

    Json bad_freq = read_json(manifest_path("t4_product.json"));
    bad_freq["forms"]["alpha"]["terms"][0]["coef"] = "sin(1/2*theta3)";
    CHECK_THROWS_AS(manifest_from_json(bad_freq), ManifestError);
}

TEST_CASE("manifest: algebra manifests run the exact checks") {
    Manifest m = load_manifest(manifest_path("n4_1.json"));
    RunOutcome out = run_manifest_checks(m);
    CHECK(out.all_passed);
    CHECK(out.report["volume_constant"] == "1");

    // Pair-based checks on an algebra manifest are an input error.
    Manifest wrong = load_manifest(manifest_path("n4_1.json"));
    wrong.checks = {Json("reeb")};
    CHECK_THROWS_AS(run_manifest_checks(wrong), ManifestError);
}

TEST_CASE("manifest: pullback suite and the germ check") {
    Manifest m = load_manifest(manifest_path("t3_pullbacks.json"));
    RunOutcome out = run_manifest_checks(m);
    CHECK(out.all_passed);

    Manifest germ = load_manifest(manifest_path("fv_germ.json"));
    CHECK(run_manifest_checks(germ).all_passed);

    // Mismatched frequencies fail.
    Manifest bad = load_manifest(manifest_path("t3_pullbacks.json"));
    bad.checks = {Json{{"type", "pullback"}, {"map", "f1"}, {"form", "omega2"}}};
    CHECK_FALSE(run_manifest_checks(bad).all_passed);

    Manifest unknown = load_manifest(manifest_path("t3_pullbacks.json"));
    unknown.checks = {Json{{"type", "pullback"}, {"map", "f9"}, {"form", "omega1"}}};
    CHECK_THROWS_AS(run_manifest_checks(unknown), ManifestError);
}

TEST_CASE("manifest: darboux manifest with a Legendrian curve") {
    Manifest m = load_manifest(manifest_path("darboux_1_0.json"));
    RunOutcome out = run_manifest_checks(m);
    CHECK(out.all_passed);
}

TEST_CASE("catalog: the required ids are present") {
    std::vector<std::string> required{
        "darboux:1,0", "darboux:0,1", "darboux:1,1", "darboux:2,0", "darboux:0,2",
        "darboux:2,1", "darboux:1,2", "darboux:3,0", "darboux:0,3", "t4_product",
        "t4_irrational", "n4_1",       "n6_12",       "n6_13",       "t3_fn:1",
        "t3_fn:2",      "t3_fn:3",     "t3_reflection", "t5_contact", "fv_germ",
        "bundle_full",  "bundle_empty", "bundle_circles"};
    auto entries = example_catalog();
    for (const std::string& id : required) {
        bool found = false;
        for (const auto& e : entries) found |= (e.id == id);
        INFO(id);
        CHECK(found);
    }
}

TEST_CASE("catalog: representative runs succeed") {
    VerifyOptions fast{9, 1e-9, 42, 20};
    for (const std::string id :
         {"darboux:1,1", "t4_product", "n6_13", "t3_fn:2", "t3_reflection", "t5_contact",
          "fv_germ", "bundle_full", "bundle_empty", "bundle_circles"}) {
        INFO(id);
        RunOutcome out = run_catalog_entry(id, fast);
        CHECK(out.all_passed);
    }
    CHECK(run_catalog_entry("n6_13", fast).report["volume_constant"] == "1");
    CHECK(run_catalog_entry("t4_irrational:1/2", fast).all_passed);
    CHECK(run_catalog_entry("darboux:2,1", fast).all_passed);
    CHECK(run_catalog_entry("bundle_circles:0,1/2*pi,pi,3/2*pi", fast).all_passed);
    CHECK_THROWS_AS(run_catalog_entry("no_such_example", fast), ManifestError);
}

TEST_CASE("catalog: the irrational-period flag is reported") {
    VerifyOptions fast{9, 1e-9, 42, 10};
    RunOutcome out = run_catalog_entry("t4_irrational", fast);
    CHECK(out.report["eta_periods"] == "rational");  // lambda = 1/10 is rational
}

TEST_CASE("report serialization: forms round-trip through JSON") {
    ChartPtr c = torus_chart(3);
    DifferentialForm w = t3_omega_n(2, c);
    Json j = form_to_json(w);
    DifferentialForm back = form_from_json(j, c);
    CHECK(forms_equal(w, back));
}
