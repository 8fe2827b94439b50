#include "test_support.hpp"

#include "cpair/lie_algebra.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace cpair;
using namespace testsupport;

namespace {

/// Independent cyclic-sum oracle, written directly against the structure
/// constants rather than through LieAlgebra::bracket.
bool jacobi_oracle(const LieAlgebra& g) {
    const int n = g.dimension();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    Rational sum(0);
                    for (int t = 0; t < n; ++t) {
                        sum += g.structure_constant(i, j, t) * g.structure_constant(t, k, m);
                        sum += g.structure_constant(j, k, t) * g.structure_constant(t, i, m);
                        sum += g.structure_constant(k, i, t) * g.structure_constant(t, j, m);
                    }
                    if (sum != 0) return false;
                }
    return true;
}

}  // namespace

TEST_CASE("check_jacobi: catalog, abelian, and a fabricated algebra") {
    const LieAlgebra& n41 = lie_catalog_lookup("n4_1").algebra;
    CHECK(check_jacobi(n41));
    CHECK(jacobi_oracle(n41));

    LieAlgebra abelian(3);
    CHECK(check_jacobi(abelian));

    // [X1,X2]=X3, [X1,X3]=X2, [X2,X3]=X1: the cyclic sums all collapse to
    // brackets of a vector with itself, so Jacobi holds; the oracle agrees.
    LieAlgebra fab(3);
    fab.set_bracket(0, 1, 2, Rational(1));
    fab.set_bracket(0, 2, 1, Rational(1));
    fab.set_bracket(1, 2, 0, Rational(1));
    CHECK(check_jacobi(fab) == jacobi_oracle(fab));
    CHECK(check_jacobi(fab));

    // And one that genuinely fails.
    LieAlgebra bad(3);
    bad.set_bracket(0, 1, 2, Rational(1));
    bad.set_bracket(0, 2, 2, Rational(1));
    bad.set_bracket(1, 2, 0, Rational(1));
    CHECK(check_jacobi(bad) == jacobi_oracle(bad));
}

TEST_CASE("ce_differential: n4_1 covectors") {
    const LieAlgebra& g = lie_catalog_lookup("n4_1").algebra;
    InvariantForm dw2 = ce_differential(g, InvariantForm::covector(4, 1));
    // d w2 = -w1 ^ w3
    REQUIRE(dw2.coefficients().size() == 1);
    CHECK(dw2.coefficients().at({0, 2}) == Rational(-1));

    InvariantForm dw4 = ce_differential(g, InvariantForm::covector(4, 3));
    CHECK(dw4.is_zero_form());

    LieAlgebra abelian(4);
    CHECK(ce_differential(abelian, InvariantForm::covector(4, 0)).is_zero_form());
}

TEST_CASE("ce_differential: d of d vanishes on catalog and basis-changed algebras") {
    auto rng = seeded_rng(30);
    std::vector<LieAlgebra> bases;
    for (const auto& e : lie_catalog()) bases.push_back(e.algebra);
    {
        LieAlgebra heis(4);  // Heisenberg + R
        heis.set_bracket(0, 1, 2, Rational(1));
        bases.push_back(heis);
        bases.push_back(LieAlgebra(5));
    }
    for (const auto& base : bases) {
        for (int trial = 0; trial < 8; ++trial) {
            LieAlgebra g = change_basis(base, rng);
            REQUIRE(check_jacobi(g));
            for (int i = 0; i < g.dimension(); ++i) {
                InvariantForm dd = ce_differential(
                    g, ce_differential(g, InvariantForm::covector(g.dimension(), i)));
                CHECK(dd.is_zero_form());
            }
            // Also on a 2-form.
            InvariantForm two(g.dimension(), 2);
            two.add_term({0, 1}, Rational(1));
            if (g.dimension() >= 4) two.add_term({1, 3}, Rational(-2));
            CHECK(ce_differential(g, ce_differential(g, two)).is_zero_form());
        }
    }
}

TEST_CASE("is_nilpotent: catalog, abelian, and a non-nilpotent algebra") {
    for (const auto& e : lie_catalog()) {
        NilpotencyResult r = is_nilpotent(e.algebra);
        CHECK(r.nilpotent);
    }
    CHECK(is_nilpotent(lie_catalog_lookup("n6_13").algebra).steps == 4);

    LieAlgebra abelian(3);
    NilpotencyResult ab = is_nilpotent(abelian);
    CHECK(ab.nilpotent);
    CHECK(ab.steps == 1);

    LieAlgebra affine(2);  // [X1, X2] = X2: series stabilizes at span{X2}
    affine.set_bracket(0, 1, 1, Rational(1));
    CHECK_FALSE(is_nilpotent(affine).nilpotent);
}

TEST_CASE("invariant_cp_check: the three catalog pairs with frozen constants") {
    // Volume constants derived by hand-expanding the top wedge products.
    std::map<std::string, Rational> expected{{"n4_1", Rational(1)},
                                             {"n6_12", Rational(-2)},
                                             {"n6_13", Rational(1)}};
    for (const auto& e : lie_catalog()) {
        const int n = e.algebra.dimension();
        InvariantCpReport rep = invariant_cp_check(
            e.algebra, InvariantForm::covector(n, e.alpha_index - 1),
            InvariantForm::covector(n, e.eta_index - 1), e.h, e.k);
        CHECK(rep.passed());
        CHECK(rep.volume_constant == expected.at(e.name));
        CHECK(denominator(rep.volume_constant) == 1);
    }
}

TEST_CASE("ce_differential: top-degree forms differentiate to the zero form") {
    const LieAlgebra& g = lie_catalog_lookup("n4_1").algebra;
    InvariantForm top(4, 4);
    IndexTuple full{0, 1, 2, 3};
    top.add_term(full, Rational(3));
    InvariantForm d = ce_differential(g, top);
    CHECK(d.degree() == 5);
    CHECK(d.is_zero_form());
}

TEST_CASE("invariant_cp_check: a closed alpha kills the volume") {
    const LieAlgebra& g = lie_catalog_lookup("n4_1").algebra;
    // (w1, w4): d w1 = 0 forces the top form to vanish.
    InvariantCpReport rep = invariant_cp_check(g, InvariantForm::covector(4, 0),
                                               InvariantForm::covector(4, 3), 1, 0);
    CHECK(rep.alpha_power_closed);  // trivially, d w1 = 0
    CHECK_FALSE(rep.volume_nonzero);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("invariant_cp_check: dimension mismatch is an error") {
    const LieAlgebra& g = lie_catalog_lookup("n4_1").algebra;
    CHECK_THROWS_AS(invariant_cp_check(g, InvariantForm::covector(4, 1),
                                       InvariantForm::covector(4, 3), 1, 1),
                    Error);
}

TEST_CASE("catalog: brackets match the displayed data; unknown name errors") {
    const LieCatalogEntry& n41 = lie_catalog_lookup("n4_1");
    CHECK(n41.algebra.structure_constant(0, 3, 2) == 1);  // [X1,X4]=X3
    CHECK(n41.algebra.structure_constant(0, 2, 1) == 1);  // [X1,X3]=X2
    CHECK(n41.alpha_index == 2);
    CHECK(n41.eta_index == 4);

    const LieCatalogEntry& n613 = lie_catalog_lookup("n6_13");
    CHECK(n613.algebra.structure_constant(0, 5, 4) == 1);  // [X1,X6]=X5
    CHECK(n613.algebra.structure_constant(0, 4, 3) == 1);  // [X1,X5]=X4
    CHECK(n613.algebra.structure_constant(0, 3, 2) == 1);  // [X1,X4]=X3
    CHECK(n613.algebra.structure_constant(4, 5, 1) == 1);  // [X5,X6]=X2
    CHECK(n613.h == 1);
    CHECK(n613.k == 1);

    CHECK_THROWS_AS(lie_catalog_lookup("n7_99"), Error);
}

TEST_CASE("invariant Reeb data: exact fields and properties from structure constants") {
    // For each catalog pair, solve for the constant Reeb vectors exactly and
    // check the absorption identities and commutation in rational arithmetic.
    for (const auto& e : lie_catalog()) {
        const LieAlgebra& g = e.algebra;
        const int n = g.dimension();
        InvariantForm a = InvariantForm::covector(n, e.alpha_index - 1);
        InvariantForm ee = InvariantForm::covector(n, e.eta_index - 1);
        InvariantForm da = ce_differential(g, a), de = ce_differential(g, ee);

        auto top_contraction_vector = [&](const InvariantForm& omega) {
            RationalVector v(n, Rational(0));
            for (int j = 0; j < n; ++j) {
                IndexTuple t;
                for (int i = 0; i < n; ++i)
                    if (i != j) t.push_back(i);
                auto it = omega.coefficients().find(t);
                Rational c = it == omega.coefficients().end() ? Rational(0) : it->second;
                v[j] = (j % 2 == 0) ? c : -c;
            }
            return v;
        };
        auto pair_with = [&](const InvariantForm& one_form, const RationalVector& v) {
            Rational r(0);
            for (const auto& [t, c] : one_form.coefficients()) r += c * v[t[0]];
            return r;
        };

        InvariantForm omega_a =
            wedge(invariant_form_power(da, e.h), wedge(ee, invariant_form_power(de, e.k)));
        InvariantForm omega_e =
            wedge(wedge(a, invariant_form_power(da, e.h)), invariant_form_power(de, e.k));
        RationalVector V = top_contraction_vector(omega_a);
        RationalVector W = top_contraction_vector(omega_e);
        Rational sa = pair_with(a, V), se = pair_with(ee, W);
        REQUIRE(sa != 0);
        REQUIRE(se != 0);
        for (auto& x : V) x /= sa;
        for (auto& x : W) x /= se;

        CHECK(pair_with(a, V) == 1);
        CHECK(pair_with(ee, W) == 1);
        CHECK(pair_with(ee, V) == 0);
        CHECK(pair_with(a, W) == 0);
        CHECK(interior_product(V, da).is_zero_form());
        CHECK(interior_product(V, de).is_zero_form());
        CHECK(interior_product(W, da).is_zero_form());
        CHECK(interior_product(W, de).is_zero_form());
        RationalVector comm = g.bracket(V, W);
        for (const Rational& x : comm) CHECK(x == 0);
    }
}

TEST_CASE("n4_1 bridge: invariant pair agrees with the chart-based verifier") {
    // Left-invariant coframe realized by polynomial forms on R^4:
    //   w1 = dx1, w2 = dx2 - x1 dx3 + 1/2 x1^2 dx4, w3 = dx3 - x1 dx4,
    //   w4 = dx4, so that d w2 = -w1^w3, d w3 = -w1^w4, d w1 = d w4 = 0.
    ChartPtr c = euclidean_chart({"x1", "x2", "x3", "x4"});
    DifferentialForm w1 = DifferentialForm::d_coordinate(c, 0);
    DifferentialForm w2(c, 1);
    w2.add_term({1}, parse_expr("1", c));
    w2.add_term({2}, parse_expr("-x1", c));
    w2.add_term({3}, parse_expr("1/2*x1^2", c));
    DifferentialForm w3(c, 1);
    w3.add_term({2}, parse_expr("1", c));
    w3.add_term({3}, parse_expr("-x1", c));
    DifferentialForm w4 = DifferentialForm::d_coordinate(c, 3);

    // Structure equations hold.
    CHECK(forms_equal(exterior_derivative(w2), -wedge(w1, w3)));
    CHECK(forms_equal(exterior_derivative(w3), -wedge(w1, w4)));
    CHECK(exterior_derivative(w1).is_zero_form());
    CHECK(exterior_derivative(w4).is_zero_form());

    ContactPair cp(w2, w4, 1, 0);
    VerificationReport rep = verify(cp);
    CHECK(rep.passed());
    CHECK(rep.find("volume")->status == CheckStatus::SymbolicPass);

    // The chart volume coefficient equals the exact invariant constant (the
    // coframe-to-coordinate matrix is unipotent, determinant one).
    const LieCatalogEntry& e = lie_catalog_lookup("n4_1");
    InvariantCpReport inv = invariant_cp_check(
        e.algebra, InvariantForm::covector(4, e.alpha_index - 1),
        InvariantForm::covector(4, e.eta_index - 1), e.h, e.k);
    ScalarExpr vol = volume_coefficient(cp);
    CHECK(is_zero(vol - ScalarExpr::constant(c, inv.volume_constant)));

    // Invariant characteristic distributions are involutive, via exact
    // bracket closure in the structure constants.
    const LieAlgebra& g = e.algebra;
    // ker{w2, dw2} = span{X4}; ker{w4, dw4} = span{X1, X2, X3}.
    RationalVector x1{Rational(1), Rational(0), Rational(0), Rational(0)};
    RationalVector x2{Rational(0), Rational(1), Rational(0), Rational(0)};
    RationalVector x3{Rational(0), Rational(0), Rational(1), Rational(0)};
    auto in_span123 = [](const RationalVector& v) { return v[3] == 0; };
    CHECK(in_span123(g.bracket(x1, x2)));
    CHECK(in_span123(g.bracket(x1, x3)));
    CHECK(in_span123(g.bracket(x2, x3)));
}
