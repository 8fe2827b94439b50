#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace cpair;
using namespace testsupport;

TEST_CASE("pullback: the T^3 family f_n preserves omega_n") {
    ChartPtr c = torus_chart(3);
    for (int n = 1; n <= 3; ++n) {
        DifferentialForm w = t3_omega_n(n, c);
        CHECK(forms_equal(pullback(t3_map_fn(n, c), w), w));
    }
}

TEST_CASE("pullback: frequency mismatch breaks invariance") {
    ChartPtr c = torus_chart(3);
    CHECK_FALSE(forms_equal(pullback(t3_map_fn(1, c), t3_omega_n(2, c)), t3_omega_n(2, c)));
    CHECK_FALSE(forms_equal(pullback(t3_map_fn(2, c), t3_omega_n(3, c)), t3_omega_n(3, c)));
}

TEST_CASE("pullback: the T^3 reflection preserves omega") {
    ChartPtr c = torus_chart(3);
    DifferentialForm w = t3_omega_n(1, c);
    CHECK(forms_equal(pullback(t3_reflection_map(c), w), w));
}

TEST_CASE("pullback: the five-term T^5 contact form is preserved") {
    ChartPtr c = torus_chart(5);
    DifferentialForm w = t5_contact_form(c);
    CHECK(forms_equal(pullback(t5_map(c), w), w));
}

TEST_CASE("pullback: the tubular involution preserves the germ form") {
    ChartPtr c = fv_chart();
    DifferentialForm e = fv_eta_tilde(c);
    CHECK(forms_equal(pullback(fv_map(c), e), e));
}

TEST_CASE("pullback: identity map is the identity") {
    ChartPtr c = make_chart({"theta1", "theta2", "x"}, {true, true, false});
    auto rng = seeded_rng(20);
    for (int deg = 0; deg <= 2; ++deg) {
        DifferentialForm a = random_form(c, deg, rng);
        CHECK(forms_equal(pullback(ChartMap::identity(c), a), a));
    }
}

TEST_CASE("pullback: naturality with d and wedge") {
    ChartPtr c = make_chart({"theta1", "theta2", "x"}, {true, true, false});
    auto rng = seeded_rng(21);
    for (int i = 0; i < 15; ++i) {
        ChartMap phi = random_chart_map(c, rng);
        DifferentialForm a = random_form(c, 1, rng);
        DifferentialForm b = random_form(c, 1, rng);
        CHECK(forms_equal(pullback(phi, exterior_derivative(a)),
                          exterior_derivative(pullback(phi, a))));
        CHECK(forms_equal(pullback(phi, wedge(a, b)),
                          wedge(pullback(phi, a), pullback(phi, b))));
    }
}

TEST_CASE("pullback: finite-difference Jacobian oracle at random points") {
    ChartPtr c = make_chart({"theta1", "theta2", "x"}, {true, true, false});
    auto rng = seeded_rng(22);
    for (int i = 0; i < 10; ++i) {
        ChartMap phi = random_chart_map(c, rng);
        DifferentialForm a = random_form(c, 1, rng);
        DifferentialForm pb = pullback(phi, a);
        Point p = random_point(c, rng);
        Point image = phi.apply(p);
        auto aval = a.evaluate(image);
        const double h = 1e-6;
        for (int j = 0; j < 3; ++j) {
            // (phi^* a)_j(p) = sum_i a_i(phi(p)) d(phi_i)/dx_j
            double expect = 0;
            for (int t = 0; t < 3; ++t) {
                double d = fd_partial(phi.components()[t], p, j, h);
                auto it = aval.find({t});
                if (it != aval.end()) expect += it->second * d;
            }
            CHECK(pb.coefficient({j}).evaluate(p) == Catch::Approx(expect).margin(1e-6));
        }
    }
}

TEST_CASE("pullback: maps outside the class are rejected lazily") {
    ChartPtr c = make_chart({"theta1", "x"}, {true, false});
    // x -> x^2 is fine for polynomial coefficients but not inside sin.
    ChartMap quad(c, c, {parse_expr("theta1", c), parse_expr("x^2", c)});
    DifferentialForm poly(c, 1);
    poly.add_term({1}, parse_expr("x", c));
    CHECK_NOTHROW(pullback(quad, poly));
    DifferentialForm trig(c, 1);
    trig.add_term({0}, parse_expr("sin(x)", c));
    CHECK_THROWS_AS(pullback(quad, trig), Error);
    // Torus validation rejects non-integer winding.
    ChartMap half(c, c, {parse_expr("2*theta1", c), parse_expr("x", c)});
    CHECK_NOTHROW(half.validate_torus_map());
    // Build a half-winding component via substitution of the linear part.
    ChartPtr c2 = torus_chart(2);
    std::vector<ScalarExpr> comps{parse_expr("theta2", c2), parse_expr("theta1", c2)};
    ChartMap ok(c2, c2, comps);
    CHECK_NOTHROW(ok.validate_torus_map());
}

TEST_CASE("lie_bracket: frozen examples and antisymmetry") {
    ChartPtr c = euclidean_chart({"x", "y"});
    VectorField ex = VectorField::basis(c, 0), ey = VectorField::basis(c, 1);
    CHECK(lie_bracket(ex, ey).is_zero_field());

    // [x d/dy, d/dx] = -d/dy
    VectorField xdy = ey * ScalarExpr::coordinate(c, 0);
    VectorField br = lie_bracket(xdy, ex);
    CHECK(is_zero(br.component(0)));
    CHECK(is_zero(br.component(1) + parse_expr("1", c)));

    auto rng = seeded_rng(23);
    ChartPtr m = make_chart({"theta1", "x"}, {true, false});
    for (int i = 0; i < 15; ++i) {
        VectorField X = random_vector_field(m, rng), Y = random_vector_field(m, rng);
        VectorField sum = lie_bracket(X, Y) + lie_bracket(Y, X);
        CHECK(sum.is_zero_field());
    }
}

TEST_CASE("lie_derivative: Cartan frozen example and derivation rule") {
    ChartPtr c = euclidean_chart({"x", "y"});
    // L_{d/dx}(x dy) = dy, worked by hand through the Cartan formula.
    DifferentialForm xdy(c, 1);
    xdy.add_term({1}, ScalarExpr::coordinate(c, 0));
    DifferentialForm l = lie_derivative(VectorField::basis(c, 0), xdy);
    CHECK(is_zero(l.coefficient({1}) - parse_expr("1", c)));
    CHECK(is_zero(l.coefficient({0})));

    // Closed form annihilated by the field: L_X a = 0.
    DifferentialForm dy = DifferentialForm::d_coordinate(c, 1);
    CHECK(lie_derivative(VectorField::basis(c, 0), dy).is_zero_form());

    auto rng = seeded_rng(24);
    ChartPtr m = make_chart({"theta1", "x", "y"}, {true, false, false});
    for (int i = 0; i < 10; ++i) {
        VectorField X = random_vector_field(m, rng);
        DifferentialForm a = random_form(m, 1, rng), b = random_form(m, 1, rng);
        DifferentialForm lhs = lie_derivative(X, wedge(a, b));
        DifferentialForm rhs = wedge(lie_derivative(X, a), b) + wedge(a, lie_derivative(X, b));
        CHECK(forms_equal(lhs, rhs));
    }
}

TEST_CASE("lie_derivative: flow finite-difference cross-check") {
    ChartPtr c = make_chart({"theta1", "x"}, {true, false});
    auto rng = seeded_rng(25);
    const double eps = 1e-4;
    for (int i = 0; i < 4; ++i) {
        VectorField X = random_vector_field(c, rng);
        DifferentialForm a = random_form(c, 1, rng);
        DifferentialForm la = lie_derivative(X, a);
        auto field = [&](const Eigen::VectorXd& x) {
            Point p(c, {x(0), x(1)});
            auto v = X.evaluate(p);
            Eigen::VectorXd r(2);
            r << v[0], v[1];
            return r;
        };
        auto dfield = [&](const Eigen::VectorXd& x) {
            Point p(c, {x(0), x(1)});
            Eigen::MatrixXd J(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int s = 0; s < 2; ++s) J(r, s) = X.component(r).differentiate(s).evaluate(p);
            return J;
        };
        for (int j = 0; j < 5; ++j) {
            Point p = random_point(c, rng);
            Eigen::VectorXd x0(2);
            x0 << p[0], p[1];
            auto [xp, Jp] = rk4_flow_with_jacobian(field, dfield, x0, eps, eps / 4);
            auto [xm, Jm] = rk4_flow_with_jacobian(field, dfield, x0, -eps, eps / 4);
            auto covec = [&](const Eigen::VectorXd& at) {
                Point q(c, {at(0), at(1)});
                Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
                for (const auto& [t, coefv] : a.coefficients()) v(t[0]) = coefv.evaluate(q);
                return v;
            };
            Eigen::VectorXd pulled_p = Jp.transpose() * covec(xp);
            Eigen::VectorXd pulled_m = Jm.transpose() * covec(xm);
            Eigen::VectorXd fd = (pulled_p - pulled_m) / (2 * eps);
            for (int t = 0; t < 2; ++t)
                CHECK(la.coefficient({t}).evaluate(p) == Catch::Approx(fd(t)).margin(1e-6));
        }
    }
}

TEST_CASE("curves: velocity and class restrictions") {
    ChartPtr c = torus_chart(4);
    CurveSpec gamma(c, {"0", "0", "1/3*pi", "t"}, 0.0, 1.0);
    auto vel = gamma.velocity();
    CHECK(is_zero(vel[0]));
    CHECK(is_zero(vel[3] - ScalarExpr::constant(gamma.param_chart(), Rational(1))));
    Point p = gamma.position(0.25);
    CHECK(p[2] == Catch::Approx(std::numbers::pi / 3));
    CHECK(p[3] == Catch::Approx(0.25));
}
