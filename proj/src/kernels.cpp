#include "maxreg/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maxreg::kernels {

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace {

double lag_sum_one(std::size_t k, std::size_t m, double h, const IncrementFn& inc, double p) {
    if (k == 0 || k >= m) return 0.0;
    const std::size_t cnt = m - k + 1;
    std::vector<double> g(cnt);
    for (std::size_t j = 0; j < cnt; ++j) g[j] = std::pow(inc(j + k, j), p);
    g.front() *= 0.5;
    g.back() *= 0.5;
    return h * pairwise_sum(g);
}

double holder_row(std::size_t i, std::span<const double> t, const IncrementFn& inc, double alpha) {
    double c = 0.0;
    for (std::size_t j = 0; j < i; ++j) c = std::max(c, inc(i, j) / std::pow(t[i] - t[j], alpha));
    return c;
}

}  // namespace

namespace serial {

std::vector<double> lag_sums(std::size_t m, double h, const IncrementFn& inc, double p) {
    std::vector<double> D(m + 1);
    for (std::size_t k = 0; k <= m; ++k) D[k] = lag_sum_one(k, m, h, inc, p);
    return D;
}

double holder_constant(std::span<const double> t, const IncrementFn& inc, double alpha) {
    double c = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) c = std::max(c, holder_row(i, t, inc, alpha));
    return c;
}

void tabulate(std::size_t n, const std::function<double(std::size_t)>& f, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
}

}  // namespace serial

namespace omp {

std::vector<double> lag_sums(std::size_t m, double h, const IncrementFn& inc, double p) {
    std::vector<double> D(m + 1);
    const long n = long(m + 1);
#pragma omp parallel for schedule(dynamic, 4)
    for (long k = 0; k < n; ++k) D[std::size_t(k)] = lag_sum_one(std::size_t(k), m, h, inc, p);
    return D;
}

double holder_constant(std::span<const double> t, const IncrementFn& inc, double alpha) {
    double c = 0.0;
    const long n = long(t.size());
#pragma omp parallel for reduction(max : c) schedule(dynamic, 8)
    for (long i = 1; i < n; ++i) c = std::max(c, holder_row(std::size_t(i), t, inc, alpha));
    return c;
}

void tabulate(std::size_t n, const std::function<double(std::size_t)>& f, std::span<double> out) {
    const long nn = long(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < nn; ++i) out[std::size_t(i)] = f(std::size_t(i));
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace maxreg::kernels
