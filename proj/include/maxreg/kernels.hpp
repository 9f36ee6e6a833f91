#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace maxreg {

/// ||F(t_i) - F(t_j)|| for node indices i, j.
using IncrementFn = std::function<double(std::size_t, std::size_t)>;

namespace kernels {

/// Pairwise (cascade) summation; fixed association order, so results do not depend on
/// how the caller split the work.
double pairwise_sum(std::span<const double> v);

// Data-parallel hot loops. Each has a serial reference and an OpenMP variant; the OpenMP
// variant assigns whole output entries to threads and reproduces the serial result bit for bit.

namespace serial {

/// D_k = trapezoid over s of ||F(s + k h) - F(s)||^p, k = 0..m (uniform grid, step h).
std::vector<double> lag_sums(std::size_t m, double h, const IncrementFn& inc, double p);

/// max over i > j of inc(i, j) / (t_i - t_j)^alpha
double holder_constant(std::span<const double> t, const IncrementFn& inc, double alpha);

/// out[i] = f(i) for i < n, f must be safe to call concurrently.
void tabulate(std::size_t n, const std::function<double(std::size_t)>& f, std::span<double> out);

}  // namespace serial

namespace omp {

std::vector<double> lag_sums(std::size_t m, double h, const IncrementFn& inc, double p);
double holder_constant(std::span<const double> t, const IncrementFn& inc, double alpha);
void tabulate(std::size_t n, const std::function<double(std::size_t)>& f, std::span<double> out);

}  // namespace omp

/// Threads the OpenMP variants may use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace kernels
}  // namespace maxreg
