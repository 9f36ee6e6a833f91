#pragma once

#include <cstdint>
#include <vector>

namespace maxreg::critical {

/// u(t,x) = c(x) (sin(t phi(x)) + d) on (eps, 1/2] with c = x|log x|, phi = w = (x|log x|)^{-3/2}
/// and V-norm weight w. psi = 2 / phi = 2 (x|log x|)^{3/2}.
struct CriticalExample {
    double d = 2.0;
    double eps = 1e-10;
    double ratio = 0.9;        // geometric grading of the spatial grid toward 0
    std::size_t nodes = 400;
    std::size_t sub = 4;       // geometric sub-cells per grid cell for the oscillatory quadrature
    double T = 1.0;

    void validate() const;
};

double c(double x);
double phi(double x);
double psi(double x);
/// Inverse of psi on (0, 1/e) by bisection in log x; r must lie in (0, psi(1/e)).
double psi_inv(double r);
double u(const CriticalExample& ex, double t, double x);

struct TruncatedNorm {
    double eps;
    double I;
    double closed_form;  // log|log eps| - log log 2
};

/// I(eps) = int_eps^{1/2} |c phi|^2 dx on geometrically graded Gauss-Legendre panels.
std::vector<TruncatedNorm> derivative_norm_truncated(const std::vector<double>& eps_list);

struct SinCheck {
    double max_violation;   // max of |sin t phi - sin s phi|^2 - min(|t-s|^2 phi^2, 4)
    double crossover_error; // max |psi^2 phi^2 - 4| over the grid nodes
    std::size_t samples;
};

SinCheck sin_increment_bound_check(const CriticalExample& ex, std::size_t samples, std::uint64_t seed);

struct InnerBounds {
    double r;
    double split;   // psi^{-1}(r)
    double term1;   // int_0^split x^{1/2} |log x|^{1/2}
    double bound1;  // r / |log r|
    double term2;   // int_split^{1/2} x^{-5/2} |log x|^{-5/2}
    double bound2;  // 1 / (r |log r|)
};

InnerBounds inner_integral_bounds(double r);

/// ||u(t) - u(s)||_V^2 = int_eps^{1/2} w c^2 (sin t phi - sin s phi)^2 dx. Below x = 1/20 the
/// integral is taken in y = phi(x) with Filon panels; beyond the split y = 2/|t-s| the
/// cosine expansion is used, before it the product form.
double increment_sq(const CriticalExample& ex, double t, double s);
/// Same quantity straight from u (d included) on x-panels fine enough to resolve the phase.
/// Throws NumericalError when that would need more than 10^7 panels.
double increment_sq_brute(const CriticalExample& ex, double t, double s);

struct CriticalNorm {
    double q;
    double value;                 // at the finest cutoff
    std::vector<double> cutoffs;  // diagonal cutoffs, descending
    std::vector<double> values;   // norm with |t-s| >= cutoff
    double drift;                 // relative change between the two finest cutoffs
    bool flagged;                 // drift > 10 %
    double regime1_share;         // share of the q-th power from x < psi^{-1}(|t-s|)
    double regime2_share;
    double bound;                 // same integral with G replaced by 4 term1 + r^2 term2
};

/// ||t -> u(t)||_{W^{1/2,q}([0,T]; V)} for each q; the increment table is shared across q.
std::vector<CriticalNorm> critical_frac_sweep(const CriticalExample& ex, const std::vector<double>& qs,
                                              std::vector<double> cutoffs = {1e-4, 1e-6, 1e-8, 1e-10, 1e-12},
                                              bool parallel = true);
CriticalNorm critical_frac_norm(const CriticalExample& ex, double q,
                                std::vector<double> cutoffs = {1e-4, 1e-6, 1e-8, 1e-10, 1e-12});

}  // namespace maxreg::critical
