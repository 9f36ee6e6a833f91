#include <doctest.h>

#include <cmath>

#include "maxreg/error.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/volterra.hpp"

using namespace maxreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

Forcing const_forcing(const TimeGrid& tg, double c) {
    return Forcing::from_trajectory(Trajectory::scalar(tg, [c](double) { return c; }));
}

double max_err(const Trajectory& u, double (*exact)(double)) {
    double e = 0;
    for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i](0) - exact(u.grid.t(i))));
    return e;
}

}  // namespace

TEST_SUITE("volterra") {

TEST_CASE("S1 and S2 closed forms") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 200);
    auto fam = OperatorFamily::from_function(tg, [](double t) { return scalar(1.0 + t); });
    fam.set_certificate({RegularityCertificate::Kind::holder, 1.0, 1.0, 0.0});
    VolterraSystem sys{fam, const_forcing(tg, 1.0)};
    const Trajectory one = Trajectory::scalar(tg, [](double) { return 1.0; });
    // oracle: int_0^1 r e^{-2r} dr
    CHECK(apply_S1(sys, one).values.back()(0) == doctest::Approx(0.148498537572540).epsilon(1e-4));
    CHECK(apply_S1(sys, Trajectory::zeros(tg, 1)).values.back()(0) == 0.0);

    OperatorFamily aut(tg, std::vector<MatrixXd>(201, scalar(1.0)));
    VolterraSystem as{aut, const_forcing(tg, 1.0)};
    CHECK(apply_S2(as).values.back()(0) == doctest::Approx(0.632120558828558).epsilon(1e-8));
    const Trajectory s1 = apply_S1(as, one);
    for (const auto& v : s1.values) CHECK(v(0) == 0.0);
    VolterraSystem zs{aut, Forcing::zeros(tg, 1)};
    CHECK(apply_S2(zs).values.back()(0) == 0.0);
}

TEST_CASE("S2 for a constant vector forcing") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 100);
    MatrixXd A(2, 2);
    A << 2, -1, -1, 3;
    OperatorFamily fam(tg, std::vector<MatrixXd>(101, A));
    VectorXd f0(2);
    f0 << 1, -2;
    VolterraSystem sys{fam, Forcing::from_trajectory(Trajectory::from_function(tg, [&](double) { return f0; }))};
    const VectorXd exact = A.inverse() * (MatrixXd::Identity(2, 2) - semigroup(A, 1.0)) * f0;
    CHECK((apply_S2(sys).values.back() - exact).norm() < 1e-8);
}

TEST_CASE("singular moment rule without certificate falls back") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 20);
    auto fam = OperatorFamily::from_function(tg, [](double t) { return scalar(1.0 + t); });
    VolterraSystem sys{fam, const_forcing(tg, 1.0), 0.5, KernelQuadrature::singular_moment};
    bool flagged = false;
    apply_S1(sys, Trajectory::scalar(tg, [](double) { return 1.0; }), &flagged);
    CHECK(flagged);
}

TEST_CASE("integral equation") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 200);
    OperatorFamily aut(tg, std::vector<MatrixXd>(201, scalar(1.0)));
    const auto zero = solve_integral_equation({aut, Forcing::zeros(tg, 1)});
    for (const auto& v : zero.u.values) CHECK(v(0) == 0.0);
    const auto one = solve_integral_equation({aut, const_forcing(tg, 1.0)});
    CHECK(max_err(one.u, [](double t) { return 1 - std::exp(-t); }) < 1e-6);

    // non-autonomous: reference is implicit midpoint with 100x the steps
    auto fam = OperatorFamily::from_function(tg, [](double t) { return scalar(1.0 + t); });
    fam.set_certificate({RegularityCertificate::Kind::holder, 1.0, 1.0, 0.0});
    const auto ie = solve_integral_equation({fam, const_forcing(tg, 1.0)});
    const TimeGrid fine = TimeGrid::uniform(1.0, 20000);
    auto ffam = OperatorFamily::from_function(fine, [](double t) { return scalar(1.0 + t); });
    const auto ref = solve_timestepper(ffam, const_forcing(fine, 1.0), VectorXd::Zero(1));
    CHECK(ie.u.values.back()(0) == doctest::Approx(ref.values.back()(0)).epsilon(1e-3));
    CHECK(ie.residual_rel < 1e-10);

    IntegralSolveOptions nopt;
    nopt.neumann = true;
    const auto nm = solve_integral_equation({fam, const_forcing(tg, 1.0)}, nopt);
    CHECK(nm.u.values.back()(0) == doctest::Approx(ie.u.values.back()(0)).epsilon(1e-10));
}

TEST_CASE("timestepper orders") {
    const TimeGrid z = TimeGrid::uniform(1.0, 10);
    OperatorFamily nil(z, std::vector<MatrixXd>(11, MatrixXd::Zero(2, 2)));
    VectorXd u0(2);
    u0 << 1.5, -2;
    for (const auto& v : solve_timestepper(nil, Forcing::zeros(z, 2), u0).values) CHECK((v - u0).norm() == 0.0);

    auto err = [](std::size_t m, Scheme s) {
        const TimeGrid tg = TimeGrid::uniform(1.0, m);
        OperatorFamily one(tg, std::vector<MatrixXd>(m + 1, scalar(1.0)));
        const auto u = solve_timestepper(one, Forcing::zeros(tg, 1), VectorXd::Ones(1), s);
        return max_err(u, [](double t) { return std::exp(-t); });
    };
    const double be = std::log2(err(100, Scheme::backward_euler) / err(200, Scheme::backward_euler));
    const double mp = std::log2(err(100, Scheme::implicit_midpoint) / err(200, Scheme::implicit_midpoint));
    CHECK(be == doctest::Approx(1.0).epsilon(0.05));
    CHECK(mp == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("manufactured linear solution") {
    // u*(t) = sin t on a 2x2 system, f = u*' + A(t) u*
    auto run = [](std::size_t m) {
        const TimeGrid tg = TimeGrid::uniform(1.0, m);
        auto At = [](double t) {
            MatrixXd A(2, 2);
            A << 2 + t, -1, -1, 2;
            return A;
        };
        auto fam = OperatorFamily::from_function(tg, At);
        auto us = [](double t) { return VectorXd::Constant(2, std::sin(t)); };
        auto f = Trajectory::from_function(tg, [&](double t) {
            VectorXd v = VectorXd::Constant(2, std::cos(t)) + At(t) * us(t);
            return v;
        });
        const auto u = solve_timestepper(fam, Forcing::from_trajectory(f), VectorXd::Zero(2));
        double e = 0;
        for (std::size_t i = 0; i <= m; ++i) e = std::max(e, (u[i] - us(tg.t(i))).cwiseAbs().maxCoeff());
        return e;
    };
    CHECK(std::log2(run(64) / run(128)) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("initial value extension") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 400);
    OperatorFamily one(tg, std::vector<MatrixXd>(401, scalar(1.0)));
    const auto u = solve(one, Forcing::zeros(tg, 1), VectorXd::Ones(1), Route::integral);
    CHECK(max_err(u, [](double t) { return std::exp(-t); }) <= 1e-4);

    const auto ext = extend_initial_value(one, const_forcing(tg, 1.0), VectorXd::Zero(1), 2.0);
    CHECK(ext.trace == 0.0);
    const auto w = solve_timestepper(ext.B, ext.g, VectorXd::Zero(1));
    const auto mid = restrict_middle(ext, w, tg);
    const auto direct = solve_timestepper(one, const_forcing(tg, 1.0), VectorXd::Zero(1));
    for (std::size_t i = 0; i <= 400; ++i) CHECK(mid[i](0) == doctest::Approx(direct[i](0)).epsilon(1e-12));
}

TEST_CASE("routes on the autonomous scalar problem") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 1000);
    OperatorFamily one(tg, std::vector<MatrixXd>(1001, scalar(1.0)));
    for (Route r : {Route::integral, Route::midpoint}) {
        const auto u = solve(one, const_forcing(tg, 1.0), VectorXd::Zero(1), r);
        CHECK(max_err(u, [](double t) { return 1 - std::exp(-t); }) <= 1e-6);
    }
    CHECK(route_from_string("integral") == Route::integral);
    CHECK_THROWS_AS(route_from_string("rk4"), ValidationError);
}

TEST_CASE("tridiagonal solve") {
    MatrixXd M = MatrixXd::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
        M(i, i) = 4 + i;
        if (i > 0) M(i, i - 1) = -1;
        if (i < 4) M(i, i + 1) = -2;
    }
    const VectorXd b = VectorXd::LinSpaced(5, 1, 5);
    CHECK((solve_tridiagonal(M, b) - M.lu().solve(b)).norm() < 1e-13);
    MatrixXd S = MatrixXd::Zero(2, 2);
    CHECK_THROWS(solve_tridiagonal(S, VectorXd::Ones(2)));
}

}
