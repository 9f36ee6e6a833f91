#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/operator_calculus.hpp"
#include "maxreg/trajectory.hpp"

namespace maxreg {

/// Right-hand side with one-sided values per cell, so jumps at nodes are representable.
/// start[j] is f(t_j+), end[j] is f(t_{j+1}-), j = 0..m-1.
struct Forcing {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> start;
    std::vector<Eigen::VectorXd> end;

    Forcing(TimeGrid g, std::vector<Eigen::VectorXd> start, std::vector<Eigen::VectorXd> end);
    /// Continuous forcing through the node values.
    static Forcing from_trajectory(const Trajectory& f);
    static Forcing zeros(const TimeGrid& g, std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(start.front().size()); }
    /// Node values (right limits, last node uses the left limit).
    Trajectory nodal() const;
    Forcing scaled(double c) const;
};

enum class KernelQuadrature {
    exponential_linear,  // exact semigroup factor, data linear per cell (second order)
    singular_moment,     // exact moments of |t-s|^{alpha-1} (resp. |t-s|^{-theta}), data constant per cell
    left_rectangle       // plain left-endpoint rule
};

const char* to_string(KernelQuadrature q);
KernelQuadrature kernel_quadrature_from_string(const std::string& s);

struct VolterraSystem {
    const OperatorFamily& fam;
    Forcing f;
    double theta = 0.5;
    KernelQuadrature rule = KernelQuadrature::exponential_linear;
};

/// Discrete S1 u and S2 f on the system grid. `flagged` reports the rule fallback
/// (singular_moment without a regularity certificate degrades to left_rectangle).
Trajectory apply_S1(const VolterraSystem& sys, const Trajectory& u, bool* flagged = nullptr);
Trajectory apply_S2(const VolterraSystem& sys, bool* flagged = nullptr);

struct IntegralSolveOptions {
    bool neumann = false;  // piecewise Neumann iteration instead of forward substitution
    double neumann_tol = 1e-14;
    std::size_t neumann_max_sweeps = 500;
    bool verify_residual = true;
};

struct IntegralSolve {
    Trajectory u;
    double residual_rel = 0.0;  // ||u - S1 u - S2 f||_{L^2} / ||S2 f||_{L^2}
    bool rule_fallback = false;
    std::size_t neumann_intervals = 0;
    std::size_t neumann_sweeps = 0;
};

/// u = S1 u + S2 f with zero initial value.
IntegralSolve solve_integral_equation(const VolterraSystem& sys, const IntegralSolveOptions& opt = {});

enum class Scheme { backward_euler, implicit_midpoint };

const char* to_string(Scheme s);

/// Operators produced on demand, for families too long to store densely.
struct OperatorSource {
    TimeGrid grid;
    std::size_t dim;
    bool tridiagonal;
    std::function<Eigen::MatrixXd(std::size_t)> at;
    std::optional<SpaceGrid> space;
};

OperatorSource source_of(const OperatorFamily& fam);

/// Reference one-step solver for u' + A(t) u = f, u(0) = u0.
Trajectory solve_timestepper(const OperatorFamily& fam, const Forcing& f, const Eigen::VectorXd& u0,
                             Scheme scheme = Scheme::implicit_midpoint);
Trajectory solve_timestepper(const OperatorSource& src, const Forcing& f, const Eigen::VectorXd& u0,
                             Scheme scheme = Scheme::implicit_midpoint);

/// Three-piece family on [0, 3T] and the forcing that lifts u0: solving the extended problem
/// with zero initial value and reading the middle window gives the solution with u(0) = u0.
struct Extension {
    OperatorFamily B;
    Forcing g;
    std::size_t m;  // steps per third
    double trace;   // trace norm of u0 for A(0)
};

Extension extend_initial_value(const OperatorFamily& fam, const Forcing& f, const Eigen::VectorXd& u0, double p);
Trajectory restrict_middle(const Extension& ext, const Trajectory& w, const TimeGrid& original);

enum class Route { integral, midpoint, backward_euler };
const char* to_string(Route r);
Route route_from_string(const std::string& s);

/// Dispatch: integral route handles u0 != 0 through the extension.
Trajectory solve(const OperatorFamily& fam, const Forcing& f, const Eigen::VectorXd& u0, Route route,
                 double theta = 0.5, double p = 2.0,
                 KernelQuadrature rule = KernelQuadrature::exponential_linear);

/// Thomas algorithm for a tridiagonal system stored densely. Throws on a zero pivot.
Eigen::VectorXd solve_tridiagonal(const Eigen::MatrixXd& M, const Eigen::VectorXd& b);

}  // namespace maxreg
