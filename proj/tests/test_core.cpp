#include "radopt/admissible.hpp"
#include "radopt/errors.hpp"
#include "radopt/expr.hpp"
#include "radopt/grid.hpp"
#include "radopt/models.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace radopt;

TEST_CASE("grid construction and volumes") {
    Grid g1 = build_grid(1, std::vector<double>{1.0}, std::vector<int>{4});
    CHECK(g1.h[0] == doctest::Approx(0.25));
    CHECK(g1.total_volume == doctest::Approx(1.0));
    CHECK(g1.cell_count() == 4);

    Grid g2 = build_grid(2, std::vector<double>{1.0, 2.0}, std::vector<int>{10, 20});
    CHECK(g2.cell_volume == doctest::Approx(0.01));
    CHECK(g2.total_volume == doctest::Approx(2.0));

    CHECK_THROWS_AS(build_grid(1, std::vector<double>{1.0}, std::vector<int>{1}), ConfigError);
    CHECK_THROWS_AS(build_grid(3, std::vector<double>{1.0, 1.0, 1.0}, std::vector<int>{4, 4, 4}),
                    ConfigError);
    CHECK_THROWS_AS(build_grid(1, std::vector<double>{-1.0}, std::vector<int>{4}), ConfigError);
}

TEST_CASE("integrate: quadrature of cell values") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{4});
    ScalarField f(g, 0.5);
    CHECK(integrate(f) == doctest::Approx(0.5));

    ScalarField z(g, 0.0);
    CHECK(integrate(z) == 0.0);

    ScalarField alt(g);
    alt.values = {1.0, 0.0, 1.0, 0.0};
    CHECK(integrate(alt) == doctest::Approx(0.5));

    // all-ones integrates to the exact total volume
    Grid g2 = build_grid(2, std::vector<double>{1.0, 2.0}, std::vector<int>{10, 20});
    ScalarField ones(g2, 1.0);
    CHECK(integrate(ones) == g2.total_volume);
}

TEST_CASE("integrate is linear") {
    Grid g = build_grid(1, std::vector<double>{2.0}, std::vector<int>{16});
    uint64_t st = derive_seed(1, 0);
    ScalarField f(g), h(g);
    for (size_t i = 0; i < f.values.size(); ++i) {
        f.values[i] = uniform01(st) - 0.3;
        h.values[i] = uniform01(st) * 2.0;
    }
    double a = 1.7, b = -0.4;
    ScalarField mix(g);
    for (size_t i = 0; i < f.values.size(); ++i) mix.values[i] = a * f.values[i] + b * h.values[i];
    CHECK(integrate(mix) == doctest::Approx(a * integrate(f) + b * integrate(h)).epsilon(1e-13));
}

TEST_CASE("expression parser: evaluation and derivatives") {
    ExprPtr e = parse_expression("x*(1-x) + 0.5*sin(pi*y)");
    CHECK(e->eval({0.5, 0.5}) == doctest::Approx(0.25 + 0.5));
    ExprPtr dx = e->derivative(0);
    CHECK(dx->eval({0.25, 0.1}) == doctest::Approx(1.0 - 0.5));
    ExprPtr dy = e->derivative(1);
    CHECK(dy->eval({0.0, 0.0}) == doctest::Approx(0.5 * 3.14159265358979323846));

    CHECK(parse_expression("exp(-x)")->eval({2.0, 0.0}) == doctest::Approx(std::exp(-2.0)));
    CHECK(parse_expression("6/3/2")->eval({0, 0}) == doctest::Approx(1.0));

    CHECK_THROWS_AS(parse_expression("x +"), ConfigError);
    CHECK_THROWS_AS(parse_expression("foo(x)"), ConfigError);
    CHECK_THROWS_AS(parse_expression("sin x"), ConfigError);
    CHECK_THROWS_AS(parse_expression("(x"), ConfigError);
}

TEST_CASE("builtin reactions") {
    ReactionModel logistic = builtin_reaction("logistic");
    CHECK(logistic.eval(0, {}, 0.5) == doctest::Approx(0.25));
    CHECK(logistic.deriv(0, {}, 0.0) == doctest::Approx(1.0));
    CHECK(logistic.lipschitz_M == 1.0);
    CHECK(logistic.strictly_concave);
    CHECK(logistic.nonnegative_on_unit);

    ReactionModel zero = builtin_reaction("zero");
    CHECK(zero.eval(0, {}, 0.731) == 0.0);
    CHECK(zero.lipschitz_M == 0.0);

    ReactionModel cn = builtin_reaction("convex_negative");
    CHECK(cn.eval(0, {}, 0.5) == doctest::Approx(-0.25));
    CHECK_FALSE(cn.strictly_concave);

    CHECK_THROWS_AS(builtin_reaction("karma"), ConfigError);
}

TEST_CASE("logistic concavity over every lattice triple") {
    // second divided differences of u(1-u) at all 0 <= a < b < c <= 1 on the
    // 0.01 lattice are negative
    ReactionModel f = builtin_reaction("logistic");
    Point p{0.5, 0.0};
    bool all_negative = true;
    for (int a = 0; a <= 98 && all_negative; ++a)
        for (int b = a + 1; b <= 99 && all_negative; ++b)
            for (int c = b + 1; c <= 100; ++c) {
                double ua = 0.01 * a, ub = 0.01 * b, uc = 0.01 * c;
                double d1 = (f.eval(0, p, ub) - f.eval(0, p, ua)) / (ub - ua);
                double d2 = (f.eval(0, p, uc) - f.eval(0, p, ub)) / (uc - ub);
                if (d2 - d1 >= 0.0) {
                    all_negative = false;
                    break;
                }
            }
    CHECK(all_negative);
}

TEST_CASE("reaction hypothesis sampling") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{8});
    CHECK(check_reaction_hypotheses(builtin_reaction("logistic"), g, 1.0).empty());
    CHECK(check_reaction_hypotheses(builtin_reaction("zero"), g, 1.0).empty());

    ReactionModel het = heterogeneous_logistic([](Point p) { return 1.0 + p.x; }, 2.0);
    CHECK(check_reaction_hypotheses(het, g, 1.0).empty());

    // f(1) != 0 must be flagged
    ReactionModel bad = builtin_reaction("logistic");
    bad.eval = [](double, Point, double u) { return u; };
    auto issues = check_reaction_hypotheses(bad, g, 1.0);
    REQUIRE_FALSE(issues.empty());
    CHECK(issues.front().find("must vanish") != std::string::npos);
}

TEST_CASE("velocity sampling and validation") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{50});

    SUBCASE("tangential parabola: alpha hit at the closed boundary") {
        auto q = [](Point p) { return p.x * (1.0 - p.x); };
        auto dq = [](Point p) { return 1.0 - 2.0 * p.x; };
        VelocityField v = make_velocity(g, q, {}, 1.0, BoundaryPolicy::require_tangential, dq);
        FieldReport r = validate_field(v, g);
        CHECK(r.max_boundary_normal == 0.0);
        CHECK(r.alpha == doctest::Approx(1.0)); // max of 1-2x on the closed interval
        CHECK(r.alpha <= r.div_bound_B);
    }

    SUBCASE("q = -x under the relaxed policy") {
        auto q = [](Point p) { return -p.x; };
        auto dq = [](Point) { return -1.0; };
        VelocityField v = make_velocity(g, q, {}, 1.0, BoundaryPolicy::allow_nonzero_normal, dq);
        FieldReport r = validate_field(v, g);
        CHECK(r.alpha == doctest::Approx(-1.0));
        CHECK(r.divergence_integral == doctest::Approx(-1.0));
        // negative divergence with a tangential request would be inconsistent
        VelocityField vt = make_velocity(g, q, {}, 1.0, BoundaryPolicy::require_tangential, dq);
        CHECK_THROWS_AS(validate_field(vt, g), ConfigError);
    }

    SUBCASE("constant field violates the tangential policy") {
        auto q = [](Point) { return 1.0; };
        VelocityField v = make_velocity(g, q, {}, 1.0, BoundaryPolicy::allow_nonzero_normal);
        CHECK(validate_field(v, g).max_boundary_normal == doctest::Approx(1.0));
        VelocityField vt = make_velocity(g, q, {}, 1.0, BoundaryPolicy::require_tangential);
        CHECK_THROWS_AS(validate_field(vt, g), ConfigError);
    }

    SUBCASE("tangential fields have zero divergence integral, and the alpha<0 conflict warns") {
        uint64_t st = derive_seed(3, 3);
        for (int trial = 0; trial < 5; ++trial) {
            double a = uniform01(st), b = 2.0 * uniform01(st) - 1.0;
            auto q = [=](Point p) { return a * p.x * (1.0 - p.x) * (b + std::cos(3.0 * p.x)); };
            VelocityField v = make_velocity(g, q, {}, 1.0, BoundaryPolicy::require_tangential);
            FieldReport r = validate_field(v, g);
            CHECK(std::abs(r.divergence_integral) <= 10.0 * g.h[0]);
        }
        auto qneg = [](Point p) { return 0.5 - p.x; }; // div = -1 but tangential impossible
        VelocityField v =
            make_velocity(g, qneg, {}, 1.0, BoundaryPolicy::allow_nonzero_normal);
        FieldReport r = validate_field(v, g);
        CHECK(r.alpha < 0.0);
        CHECK(r.warnings.empty()); // warning applies to the tangential policy only

        // a tangential field whose supplied divergence closure claims alpha<0
        // triggers the documented inconsistency warning
        auto qt = [](Point p) { return p.x * (1.0 - p.x); };
        VelocityField vw = make_velocity(g, qt, {}, 1.0, BoundaryPolicy::require_tangential,
                                         [](Point) { return -1.0; });
        FieldReport rw = validate_field(vw, g);
        CHECK(rw.alpha < 0.0);
        REQUIRE_FALSE(rw.warnings.empty());
        CHECK(rw.warnings.front().find("divergence") != std::string::npos);
    }
}

TEST_CASE("diffusion models") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{8});
    CHECK_THROWS_AS(constant_diffusion(0.0), ConfigError);
    DiffusionModel var = variable_diffusion([](Point p) { return 0.1 + 0.05 * p.x; }, 0.1);
    CHECK(check_diffusion_hypotheses(var, g).empty());
    DiffusionModel low = variable_diffusion([](Point p) { return 0.05 + 0.0 * p.x; }, 0.1);
    CHECK_FALSE(check_diffusion_hypotheses(low, g).empty());
}

TEST_CASE("capped-simplex projection: hand-solved shift") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{4});
    ScalarField v(g);
    v.values = {1.2, 0.4, 0.2, 0.0};
    InitialDatum p = project_capped_simplex(v, 0.5);
    CHECK(p.field.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.field.values[1] == doctest::Approx(0.4 + 2.0 / 15.0).epsilon(1e-10));
    CHECK(p.field.values[2] == doctest::Approx(0.2 + 2.0 / 15.0).epsilon(1e-10));
    CHECK(p.field.values[3] == doctest::Approx(2.0 / 15.0).epsilon(1e-10));
    CHECK(integrate(p.field) == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("projection edge cases") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{4});

    SUBCASE("feasible points are fixed points") {
        ScalarField v(g);
        v.values = {0.9, 0.5, 0.4, 0.2};
        InitialDatum p = project_capped_simplex(v, integrate(v));
        for (size_t i = 0; i < 4; ++i)
            CHECK(p.field.values[i] == doctest::Approx(v.values[i]).epsilon(1e-11));
    }

    SUBCASE("m = |Omega| forces the all-ones datum") {
        ScalarField v(g);
        v.values = {2.0, -0.3, 0.1, 0.9};
        InitialDatum p = project_capped_simplex(v, g.total_volume);
        for (size_t i = 0; i < 4; ++i) CHECK(p.field.values[i] == 1.0);
    }

    SUBCASE("infeasible masses are rejected") {
        ScalarField v(g, 0.5);
        CHECK_THROWS_AS(project_capped_simplex(v, 0.0), ConfigError);
        CHECK_THROWS_AS(project_capped_simplex(v, -0.1), ConfigError);
        CHECK_THROWS_AS(project_capped_simplex(v, 1.5), ConfigError);
    }

    SUBCASE("inputs saturated at the pre-clamp still project") {
        ScalarField v(g, 2.0); // needs tau = -1.5, outside the naive [-1,2] shift range
        InitialDatum p = project_capped_simplex(v, 0.5);
        CHECK(integrate(p.field) == doctest::Approx(0.5).epsilon(1e-11));
        for (size_t i = 0; i < 4; ++i) CHECK(p.field.values[i] == doctest::Approx(0.5));
    }
}

TEST_CASE("projection properties: idempotent, non-expansive, matches lattice search") {
    Grid g3 = build_grid(1, std::vector<double>{1.0}, std::vector<int>{3});
    uint64_t st = derive_seed(11, 0);

    for (int trial = 0; trial < 20; ++trial) {
        ScalarField a(g3), b(g3);
        for (size_t i = 0; i < 3; ++i) {
            a.values[i] = 3.0 * uniform01(st) - 1.0;
            b.values[i] = 3.0 * uniform01(st) - 1.0;
        }
        double m = 0.05 + 0.9 * uniform01(st);
        InitialDatum pa = project_capped_simplex(a, m);
        InitialDatum pb = project_capped_simplex(b, m);

        // idempotence
        InitialDatum paa = project_capped_simplex(pa.field, m);
        for (size_t i = 0; i < 3; ++i)
            CHECK(paa.field.values[i] == doctest::Approx(pa.field.values[i]).epsilon(1e-9));

        // non-expansive in the euclidean norm
        double da = 0.0, dp = 0.0;
        for (size_t i = 0; i < 3; ++i) {
            da += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
            dp += (pa.field.values[i] - pb.field.values[i]) *
                  (pa.field.values[i] - pb.field.values[i]);
        }
        CHECK(dp <= da * (1.0 + 1e-12));
    }

    // exhaustive lattice oracle on 3 cells: enumerate two free coordinates on
    // a 1e-3 lattice, solve the third from the mass constraint, and compare
    // quadratic objectives.
    ScalarField v(g3);
    v.values = {0.9, 0.05, 0.4};
    const double m = 0.4;
    InitialDatum p = project_capped_simplex(v, m);
    const double h = g3.cell_volume;
    double best_obj = 1e300;
    std::vector<double> best = {0, 0, 0};
    const int steps = 1000;
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; j <= steps; ++j) {
            double u0 = i * 1e-3, u1 = j * 1e-3;
            double u2 = m / h - u0 - u1;
            if (u2 < 0.0 || u2 > 1.0) continue;
            double obj = (u0 - v.values[0]) * (u0 - v.values[0]) +
                         (u1 - v.values[1]) * (u1 - v.values[1]) +
                         (u2 - v.values[2]) * (u2 - v.values[2]);
            if (obj < best_obj) {
                best_obj = obj;
                best = {u0, u1, u2};
            }
        }
    }
    double proj_obj = 0.0;
    for (size_t i = 0; i < 3; ++i)
        proj_obj += (p.field.values[i] - v.values[i]) * (p.field.values[i] - v.values[i]);
    CHECK(proj_obj <= best_obj + 1e-9);
    for (size_t i = 0; i < 3; ++i)
        CHECK(std::abs(p.field.values[i] - best[i]) <= 2e-3);
}

TEST_CASE("random admissible data") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{32});

    InitialDatum a = random_admissible(123, 0.5, g);
    InitialDatum b = random_admissible(123, 0.5, g);
    CHECK(a.field.values == b.field.values); // determinism

    for (uint64_t seed = 0; seed < 100; ++seed) {
        InitialDatum u = random_admissible(seed, 0.5, g);
        CHECK(std::abs(integrate(u.field) - 0.5) <= 1e-10);
        for (double x : u.field.values) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
    }
}
