#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/kernels.hpp"
#include "maxreg/trajectory.hpp"

namespace maxreg {

enum class StateNormKind { euclidean, grid_l2, sup };

/// Norm applied to each state vector. grid_l2 is the weighted norm sqrt(sum w_j v_j^2).
struct StateNorm {
    StateNormKind kind = StateNormKind::euclidean;
    std::vector<double> weights;

    static StateNorm euclidean() { return {}; }
    static StateNorm sup() { return {StateNormKind::sup, {}}; }
    static StateNorm grid_l2(std::vector<double> w) { return {StateNormKind::grid_l2, std::move(w)}; }

    double operator()(const Eigen::VectorXd& v) const;
    std::string label() const;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (int_0^T ||u(t)||^p dt)^{1/p}, composite trapezoid; p = kInfinity gives the max over nodes.
double bochner_norm(const Trajectory& u, double p, const StateNorm& norm = {});

IncrementFn trajectory_increments(const Trajectory& u, const StateNorm& norm = {});
/// ||L (F_i - F_j) R||_2 for operator samples; empty L / R mean identity.
IncrementFn operator_increments(const std::vector<Eigen::MatrixXd>& F, Eigen::MatrixXd L = {},
                                Eigen::MatrixXd R = {});

struct HolderFit {
    double alpha;
    double C;
};

/// Least-squares slope of log sup_{|t-s|=h} ||F(t)-F(s)|| over the finer half of the dyadic
/// lags h (uniform grid, at least two lags), then the smallest C with
/// ||F(t)-F(s)|| <= C |t-s|^alpha over all sampled pairs. Constant F gives (1, 0).
HolderFit holder_modulus(const TimeGrid& tg, const IncrementFn& inc, bool parallel = true);
HolderFit holder_modulus(const Trajectory& u, const StateNorm& norm = {});

struct FracNorm {
    double value = 0.0;       // homogeneous seminorm
    double band_share = 0.0;  // share of the p-th power coming from the diagonal band |t-s| < h
    double alpha_loc = 1.0;   // local Hoelder exponent fitted from the first two lags
    bool unreliable = false;  // band share > 20 % or divergent band
};

/// Gagliardo seminorm (int int ||F(t)-F(s)||^p / |t-s|^{1+alpha p})^{1/p} on a uniform grid.
/// Off-diagonal lags are integrated with exact moments of the power weight; the band
/// |t-s| < h uses the local Hoelder model fitted from the two nearest lags.
FracNorm frac_sobolev_norm(const TimeGrid& tg, const IncrementFn& inc, double alpha, double p,
                           bool parallel = true);
FracNorm frac_sobolev_norm(const Trajectory& u, double alpha, double p, const StateNorm& norm = {});

/// Inhomogeneous W^{alpha,p} = ||F||_{L^p} + seminorm.
double frac_sobolev_full(const Trajectory& u, double alpha, double p, const StateNorm& norm = {});

/// ||u0|| + (int_0^inf ||A0 e^{-s A0} u0||^p ds)^{1/p}, A0 positive definite.
double trace_norm(const Eigen::MatrixXd& A0, const Eigen::VectorXd& u0, double p, const StateNorm& norm = {});

struct RegularityReport {
    HolderFit holder;
    FracNorm frac;
    double frac_full;
    std::optional<double> trace;
    double alpha, p;
    std::string norm_label;
    std::size_t time_nodes;
};

RegularityReport regularity_report(const Trajectory& u, double alpha, double p, const StateNorm& norm = {},
                                   const Eigen::MatrixXd* A0 = nullptr);

}  // namespace maxreg
