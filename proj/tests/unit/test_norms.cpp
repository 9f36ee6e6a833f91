#include <doctest.h>

#include <cmath>
#include <random>

#include "maxreg/kernels.hpp"
#include "maxreg/norms.hpp"

using namespace maxreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE("norms") {

TEST_CASE("bochner norms") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 2000);
    CHECK(bochner_norm(Trajectory::zeros(tg, 3), 2.0) == 0.0);
    CHECK(bochner_norm(Trajectory::scalar(tg, [](double) { return 1.0; }), 2.0) == doctest::Approx(1.0));
    CHECK(bochner_norm(Trajectory::scalar(tg, [](double t) { return t; }), 2.0) ==
          doctest::Approx(0.577350269189626).epsilon(1e-6));
    CHECK(bochner_norm(Trajectory::scalar(tg, [](double t) { return -3 * t; }), kInfinity) == doctest::Approx(3.0));
}

TEST_CASE("state norms") {
    VectorXd v(3);
    v << 3, -4, 0;
    CHECK(StateNorm::euclidean()(v) == doctest::Approx(5.0));
    CHECK(StateNorm::sup()(v) == doctest::Approx(4.0));
    CHECK(StateNorm::grid_l2({0.25, 0.25, 1.0})(v) == doctest::Approx(2.5));
}

TEST_CASE("hoelder modulus") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 256);
    MatrixXd B(2, 2);
    B << 1, 2, -1, 0.5;
    std::vector<MatrixXd> lin, root, cst;
    for (double t : tg.nodes()) {
        lin.push_back(t * B);
        root.push_back(std::sqrt(t) * B);
        cst.push_back(B);
    }
    const auto hl = holder_modulus(tg, operator_increments(lin));
    CHECK(hl.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hl.C == doctest::Approx(B.jacobiSvd().singularValues()(0)).epsilon(1e-9));
    CHECK(std::abs(holder_modulus(tg, operator_increments(root)).alpha - 0.5) <= 0.05);
    const auto hc = holder_modulus(tg, operator_increments(cst));
    CHECK(hc.alpha == 1.0);
    CHECK(hc.C == 0.0);
}

TEST_CASE("fractional seminorm of t") {
    const TimeGrid tg = TimeGrid::uniform(1.0, 400);
    const Trajectory u = Trajectory::scalar(tg, [](double t) { return t; });
    const auto half = frac_sobolev_norm(u, 0.5, 2.0);
    CHECK(half.value == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_FALSE(half.unreliable);
    // oracle: sqrt(2 int_0^1 (1-r) r^{-1/2} dr)
    CHECK(frac_sobolev_norm(u, 0.75, 2.0).value == doctest::Approx(1.63299316185545).epsilon(1e-3));
    const Trajectory c = Trajectory::scalar(tg, [](double) { return 2.5; });
    CHECK(frac_sobolev_norm(c, 0.5, 2.0).value == 0.0);
    CHECK(frac_sobolev_full(u, 0.5, 2.0) ==
          doctest::Approx(1.0 + 0.577350269189626).epsilon(1e-3));
}

TEST_CASE("trace norm") {
    const VectorXd one = VectorXd::Ones(1);
    for (double lam : {1.0, 4.0, 10.0})
        CHECK(trace_norm(MatrixXd::Constant(1, 1, lam), one, 2.0) ==
              doctest::Approx(1.0 + std::sqrt(lam / 2)).epsilon(1e-6));
    CHECK(trace_norm(MatrixXd::Identity(3, 3), VectorXd::Zero(3), 2.0) == 0.0);
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
    const std::size_t m = 300;
    std::vector<double> t(m + 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> F(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        t[i] = double(i) / m;
        F[i] = std::sin(7 * t[i]) + 0.1 * U(rng);
    }
    IncrementFn inc = [&](std::size_t i, std::size_t j) { return std::abs(F[i] - F[j]); };
    const auto a = kernels::serial::lag_sums(m, 1.0 / m, inc, 2.5);
    const auto b = kernels::omp::lag_sums(m, 1.0 / m, inc, 2.5);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
    CHECK(kernels::serial::holder_constant(t, inc, 0.4) == kernels::omp::holder_constant(t, inc, 0.4));
    std::vector<double> o1(m), o2(m);
    auto f = [&](std::size_t i) { return std::exp(-F[i]); };
    kernels::serial::tabulate(m, f, o1);
    kernels::omp::tabulate(m, f, o2);
    CHECK(o1 == o2);
}

TEST_CASE("pairwise sum") {
    std::vector<double> v(1000, 0.1);
    CHECK(kernels::pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(kernels::pairwise_sum(std::vector<double>{}) == 0.0);
}

}
