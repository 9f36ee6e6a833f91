#include <doctest.h>

#include <cmath>

#include "maxreg/error.hpp"
#include "maxreg/quasilinear.hpp"

using namespace maxreg;
using Eigen::VectorXd;

TEST_SUITE("quasilinear") {

TEST_CASE("coefficient maps") {
    auto a = CoefficientMap::from_expression("1 + u^2", 1.0, 10.0);
    CHECK(a(0.0) == 1.0);
    CHECK(a(2.0) == doctest::Approx(5.0));
    CHECK(a(100.0) == 10.0);
    CHECK_FALSE(a.u_independent);
    CHECK(CoefficientMap::constant(2.0).u_independent);
    CHECK_THROWS_AS(CoefficientMap::from_expression("1 + t*u", 1.0, 2.0), ValidationError);
}

TEST_CASE("manufactured forcing matches finite differences") {
    const auto mf = manufacture("t*x*(1-x)", "1 + u^2/(1+u^2)");
    auto us = [](double t, double x) { return t * x * (1 - x); };
    auto a = [](double u) { return 1 + u * u / (1 + u * u); };
    const double t = 0.7, x = 0.3, h = 1e-4;
    const double ut = (us(t + h, x) - us(t - h, x)) / (2 * h);
    auto flux = [&](double y) { return a(us(t, y)) * (us(t, y + h) - us(t, y - h)) / (2 * h); };
    const double div = (flux(x + h) - flux(x - h)) / (2 * h);
    CHECK(mf.f(t, x) == doctest::Approx(ut - div).epsilon(1e-6));
}

TEST_CASE("u-independent coefficient converges in one iteration") {
    const auto mf = manufacture("t*x*(1-x)", "1");
    const auto prob = manufactured_problem(mf, CoefficientMap::constant(1.0), 1.0, 50, 15);
    const auto r = solve_qlp(prob);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    const auto lin = apply_frozen(prob, Trajectory::zeros(prob.tg, 15));
    CHECK((r.u.values.back() - lin.values.back()).norm() == 0.0);
}

TEST_CASE("zero data gives the zero fixed point") {
    const auto mf = manufacture("t*x*(1-x)", "1 + u^2/(1+u^2)");
    auto prob = manufactured_problem(mf, CoefficientMap::from_expression("1 + u^2/(1+u^2)", 1.0, 2.0), 1.0, 40, 15);
    prob = prob.scaled(0.0);
    const auto r = solve_qlp(prob);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    for (const auto& v : r.u.values) CHECK(v.norm() == 0.0);
}

TEST_CASE("manufactured quasilinear solution") {
    const auto mf = manufacture("t*x*(1-x)", "1 + u^2/(1+u^2)");
    const auto a = CoefficientMap::from_expression("1 + u^2/(1+u^2)", 1.0, 2.0);
    auto err = [&](std::size_t m, std::size_t n) {
        const auto prob = manufactured_problem(mf, a, 1.0, m, n);
        const auto r = solve_qlp(prob);
        REQUIRE(r.converged);
        double e = 0;
        for (std::size_t i = 0; i <= m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                e = std::max(e, std::abs(r.u[i](Eigen::Index(j)) - mf.u_star.eval(prob.tg.t(i), prob.sg.x(j + 1))));
        return e;
    };
    const double e1 = err(20, 15), e2 = err(40, 31);
    CHECK(e2 < e1);
    CHECK(std::log2(e1 / e2) >= 1.5);
}

TEST_CASE("fixed point certificate and nested stopping") {
    const auto mf = manufacture("t*x*(1-x)", "1 + u^2/(1+u^2)");
    const auto prob = manufactured_problem(mf, CoefficientMap::from_expression("1 + u^2/(1+u^2)", 1.0, 2.0), 1.0, 40, 15);
    QlpOptions o;
    o.tol = 1e-9;
    const auto r = solve_qlp(prob, o);
    REQUIRE(r.converged);
    CHECK(r.certificate < o.tol);
    CHECK(r.residuals.back() < o.tol);
    const auto again = apply_frozen(prob, r.u);
    double d = 0;
    for (std::size_t i = 0; i < again.size(); ++i) d = std::max(d, (again[i] - r.u[i]).cwiseAbs().maxCoeff());
    CHECK(d < o.tol);
    for (double tol : {2e-9, 4e-9, 1e-6}) {
        o.tol = tol;
        const auto q = solve_qlp(prob, o);
        CHECK(q.converged);
        CHECK(q.iterations <= r.iterations);
    }
    QlpOptions few;
    few.max_iter = 1;
    const auto nc = solve_qlp(prob, few);
    CHECK_FALSE(nc.converged);
    CHECK(nc.residuals.size() == 1);
}

TEST_CASE("probe bound violation is reported") {
    const auto mf = manufacture("t*x*(1-x)", "1 + u^2/(1+u^2)");
    auto prob = manufactured_problem(mf, CoefficientMap::from_expression("1 + u^2/(1+u^2)", 1.0, 2.0), 1.0, 20, 7);
    prob.probe_M = 1e-3;
    CHECK_THROWS_WITH_AS(solve_qlp(prob), doctest::Contains("t = 0.05, x = 0.125"), NumericalError);
}

TEST_CASE("problem validation") {
    const auto mf = manufacture("t*x*(1-x)", "1");
    auto prob = manufactured_problem(mf, CoefficientMap::constant(1.0), 1.0, 10, 7);
    prob.a.beta = Rational(1, 2);
    CHECK_THROWS_AS(prob.validate(), ValidationError);
    prob.a.beta = Rational(3, 5);
    prob.q = Rational(2);  // needs beta > 2/3
    CHECK_THROWS_AS(prob.validate(), ValidationError);
    prob.a.beta = Rational(7, 10);
    CHECK_NOTHROW(prob.validate());
}

TEST_CASE("composition estimate") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 400);
    const Trajectory v = Trajectory::scalar(tg, [](double t) { return t; });
    auto pw = [](double u) { return std::pow(std::abs(u), 0.6); };
    const auto c = composition_regularity(v, pw, 0.6, 0.3, 2.0);
    // oracle: both sides by adaptive quadrature of the closed-form integrands
    CHECK(c.lhs == doctest::Approx(0.690237027309251).epsilon(1e-2));
    CHECK(c.rhs == doctest::Approx(1.44337567297406).epsilon(1e-2));
    CHECK(c.ratio <= 2.0);

    const auto id = composition_regularity(v, [](double u) { return u; }, 1.0, 0.3, 2.0);
    CHECK(id.lhs == doctest::Approx(id.rhs).epsilon(1e-12));
    CHECK(composition_regularity(v, [](double) { return 4.0; }, 1.0, 0.3, 2.0).lhs == 0.0);
}

TEST_CASE("small data threshold") {
    const auto mf = manufacture("t*x*(1-x)", "1");
    const std::vector<double> scales{0.0, 1.0, 4.0, 16.0, 64.0};
    QlpOptions opt;
    opt.diagnostics = false;
    const auto lin = small_data_threshold(manufactured_problem(mf, CoefficientMap::constant(1.0), 1.0, 20, 7),
                                          scales, opt);
    CHECK(lin.cap);
    CHECK(lin.value == 64.0);
    CHECK(lin.table.front().converged);

    const auto sq = CoefficientMap::from_expression("1 + u^2", 1.0, 10.0);
    const auto mfs = manufacture("t*x*(1-x)", "1 + u^2");
    const auto th = small_data_threshold(manufactured_problem(mfs, sq, 1.0, 20, 7), scales, opt);
    CHECK(th.monotone);
    CHECK(th.value > 0.0);
    CHECK(th.table.front().converged);
}

}
