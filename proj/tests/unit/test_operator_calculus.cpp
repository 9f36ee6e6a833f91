#include <doctest.h>

#include <cmath>
#include <random>

#include "maxreg/error.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/operator_calculus.hpp"

using namespace maxreg;
using Eigen::MatrixXd;

namespace {

MatrixXd random_spd(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = N(rng);
    return B * B.transpose() / n + MatrixXd::Identity(n, n);
}

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST_SUITE("operator_calculus") {

TEST_CASE("semigroup") {
    const MatrixXd A = random_spd(30, 7);
    CHECK((semigroup(A, 0.0) - MatrixXd::Identity(30, 30)).norm() < 1e-13);
    CHECK(semigroup(scalar(1.0), 1.0)(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    for (int n : {5, 20, 50}) {
        const MatrixXd B = random_spd(n, unsigned(n));
        const MatrixXd lhs = semigroup(B, 0.3) * semigroup(B, 0.45);
        CHECK((lhs - semigroup(B, 0.75)).norm() < 1e-10);
    }
}

TEST_CASE("fractional powers and theta norms") {
    const MatrixXd A = random_spd(8, 3);
    CHECK((frac_power(A, 0.0) - MatrixXd::Identity(8, 8)).norm() < 1e-12);
    CHECK((frac_power(A, 1.0) - A).norm() < 1e-11);
    MatrixXd D = MatrixXd::Zero(2, 2);
    D(0, 0) = 4;
    D(1, 1) = 9;
    const MatrixXd R = frac_power(D, 0.5);
    CHECK(R(0, 0) == doctest::Approx(2.0));
    CHECK(R(1, 1) == doctest::Approx(3.0));
    CHECK(std::abs(R(0, 1)) < 1e-14);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    CHECK(theta_norm(scalar(4.0), 0.5, x) == doctest::Approx(2.0));
    CHECK(theta_norm(scalar(4.0), -1.0, x) == doctest::Approx(0.25));
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(8, 1.0, 2.0);
    CHECK(theta_norm(A, 0.0, y) == doctest::Approx(y.norm()));
}

TEST_CASE("sectoriality") {
    MatrixXd D = MatrixXd::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 2;
    const auto r = sectoriality_report(Eigen::MatrixXcd(D.cast<std::complex<double>>()), M_PI / 4, 400);
    CHECK(r.eigenvalues_in_sector);
    // oracle: sup of (|lambda|+1)/dist(lambda, {1,2}) on the rays arg = +-pi/4
    CHECK(r.bound == doctest::Approx(2.61312592975275).epsilon(1e-3));
    CHECK(r.bound <= 2.61312592975275 * (1 + 1e-9));

    MatrixXd N = MatrixXd::Identity(2, 2);
    N(1, 1) = -1;
    CHECK_FALSE(sectoriality_report(Eigen::MatrixXcd(N.cast<std::complex<double>>()), 3.0).eigenvalues_in_sector);

    // A = I: (|l|+1)/|l-1| on the rays is symmetric under |l| -> 1/|l|, peak 1/sin(phi/2) at |l| = 1
    const auto I = sectoriality_report(Eigen::MatrixXcd::Identity(3, 3), M_PI / 4, 400);
    CHECK(I.bound == doctest::Approx(1.0 / std::sin(M_PI / 8)).epsilon(1e-3));
}

TEST_CASE("theta stability constant") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 8);
    const MatrixXd A0 = random_spd(6, 11);
    OperatorFamily c(tg, std::vector<MatrixXd>(9, A0));
    CHECK(theta_stability_constant(c, 0.5) == doctest::Approx(1.0).epsilon(1e-10));
    auto grow = OperatorFamily::from_function(tg, [&](double t) { MatrixXd M = (1 + t) * A0; return M; });
    CHECK(theta_stability_constant(grow, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(theta_stability_constant(grow, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(grow.stability_constant().has_value());
}

TEST_CASE("kernels") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 4);
    auto fam = OperatorFamily::from_function(tg, [](double t) { return scalar(1.0 + t); });
    // t = 1, s = 0.5
    const auto k1 = kernel_K1(fam, 4, 2, 0.0);
    CHECK(k1.K(0, 0) == doctest::Approx(0.183939720585721).epsilon(1e-12));
    const TimeGrid fine = TimeGrid::uniform(1.0, 1 << 16);
    auto ff = OperatorFamily::from_function(fine, [](double t) { return scalar(1.0 + t); });
    const std::size_t last = fine.m_steps();
    CHECK(kernel_K2(ff, last, last - 1, 0.0).K(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS(kernel_K2(fam, 4, 4, 0.5), ValidationError);

    OperatorFamily aut(tg, std::vector<MatrixXd>(5, random_spd(4, 2)));
    CHECK(kernel_K1(aut, 3, 1, 0.5).K.norm() == 0.0);
    CHECK(aut.autonomous());
}

TEST_CASE("kernel slope fit of a smooth family") {
    const SpaceGrid sg = SpaceGrid::uniform(0.0, 1.0, 15);
    const TimeGrid tg = TimeGrid::uniform(1.0, 128);
    const auto g = gen::lipschitz();
    auto fam = OperatorFamily::from_field(CoefficientField::from_real_function(tg, sg, g.a, g.delta));
    const auto s2 = kernel_slope_K2(fam, 0.5);
    CHECK(s2.slope >= -0.6);
    CHECK(s2.slope <= -0.3);
    CHECK(s2.h.size() == s2.sup_norm.size());
}

}
