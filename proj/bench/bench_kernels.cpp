// Serial reference vs OpenMP variant of the data-parallel kernels.
//
//     maxreg_bench --benchmark_filter=lag_sums

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/counterexample.hpp"
#include "maxreg/kernels.hpp"

using namespace maxreg;

namespace {

// a trajectory of grid vectors; each increment is a length-n norm
struct Samples {
    std::vector<Eigen::VectorXd> F;
    std::vector<double> t;
    IncrementFn inc;

    Samples(std::size_t m, Eigen::Index n) {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> N;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i <= m; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) x(j) += N(rng) / std::sqrt(double(m));
            F.push_back(x);
            t.push_back(double(i) / double(m));
        }
        inc = [this](std::size_t i, std::size_t j) { return (F[i] - F[j]).norm(); };
    }
};

template <bool Parallel>
void BM_lag_sums(benchmark::State& st) {
    const std::size_t m = std::size_t(st.range(0));
    Samples s(m, 49);
    for (auto _ : st) {
        auto d = Parallel ? kernels::omp::lag_sums(m, 1.0 / double(m), s.inc, 2.0)
                          : kernels::serial::lag_sums(m, 1.0 / double(m), s.inc, 2.0);
        benchmark::DoNotOptimize(d.data());
    }
    st.SetComplexityN(st.range(0));
}

template <bool Parallel>
void BM_holder_constant(benchmark::State& st) {
    const std::size_t m = std::size_t(st.range(0));
    Samples s(m, 49);
    for (auto _ : st) {
        double c = Parallel ? kernels::omp::holder_constant(s.t, s.inc, 0.5)
                            : kernels::serial::holder_constant(s.t, s.inc, 0.5);
        benchmark::DoNotOptimize(c);
    }
}

// rows of the critical-example increment table
template <bool Parallel>
void BM_tabulate_increments(benchmark::State& st) {
    const std::size_t n = std::size_t(st.range(0));
    critical::CriticalExample ex;
    std::vector<double> out(n);
    auto f = [&](std::size_t i) { return critical::increment_sq(ex, 0.5, 0.5 - 0.4 * double(i + 1) / double(n)); };
    for (auto _ : st) {
        if (Parallel) kernels::omp::tabulate(n, f, out);
        else kernels::serial::tabulate(n, f, out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_lag_sums<false>)->Name("lag_sums/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lag_sums<true>)->Name("lag_sums/omp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_holder_constant<false>)->Name("holder_constant/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_holder_constant<true>)->Name("holder_constant/omp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tabulate_increments<false>)->Name("tabulate/serial")->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tabulate_increments<true>)->Name("tabulate/omp")->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
