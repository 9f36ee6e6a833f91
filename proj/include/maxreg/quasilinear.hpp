#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maxreg/exponent_planner.hpp"
#include "maxreg/expression.hpp"
#include "maxreg/mr_diagnostics.hpp"
#include "maxreg/norms.hpp"
#include "maxreg/volterra.hpp"

namespace maxreg {

/// u -> a(u), clipped to [lo, hi] so the ellipticity floor is the single number lo.
struct CoefficientMap {
    std::function<double(double)> raw;
    double lo = 1.0;
    double hi = 1.0;
    Rational beta{1};       // declared Hoelder exponent
    std::string label;
    bool u_independent = false;

    double operator()(double u) const;
    double floor() const { return lo; }

    static CoefficientMap constant(double c);
    /// Expression in the variable u (t and x must not appear).
    static CoefficientMap from_expression(const std::string& src, double lo, double hi, Rational beta = Rational(1));
};

struct QlpProblem {
    CoefficientMap a;
    TimeGrid tg;
    SpaceGrid sg;   // Dirichlet interval; boundary nodes carry u = 0
    Trajectory f;   // interior values per time node
    Eigen::VectorXd u0;
    double p = 2.0;
    Rational q{2};  // spatial integrability exponent, n = 1
    double probe_M = std::numeric_limits<double>::infinity();  // |u| bound the floor was probed on
    double monitor_order = 0.4;  // time order of the ball monitor norm

    void validate() const;
    QlpProblem scaled(double s) const;
};

struct QlpOptions {
    double tol = 1e-10;
    std::size_t max_iter = 50;
    double damping = 1.0;
    Scheme scheme = Scheme::implicit_midpoint;
    bool diagnostics = true;
};

struct QlpResult {
    Trajectory u;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> residuals;   // ||S(v_k) - v_k||_sup per iterate
    double certificate = std::numeric_limits<double>::quiet_NaN();
    bool ball_warning = false;
    std::string stop_reason;
    std::optional<MrParts> mr;       // estimate parts at the fixed point
    std::optional<HolderFit> holder; // time Hoelder fit of the spatial sup norms
};

/// One frozen-coefficient solve: the linear problem with coefficient a(v(t,x)).
Trajectory apply_frozen(const QlpProblem& prob, const Trajectory& v, Scheme scheme = Scheme::implicit_midpoint);

/// Picard iteration v_k = (1-d) v_{k-1} + d S(v_{k-1}) from v_0 = 0. Stops at the first k with
/// ||S(v_k) - v_k||_sup < tol; that last application of S is the fixed-point certificate and
/// `iterations` is k. A u-independent coefficient therefore converges with k = 1.
QlpResult solve_qlp(const QlpProblem& prob, const QlpOptions& opt = {});

struct ThresholdRow {
    double scale;
    bool converged;
    std::size_t iterations;
};

struct Threshold {
    double value;     // largest converged scale found
    bool cap;         // every probed scale converged
    bool monotone;    // once diverged, stays diverged along the table
    std::vector<ThresholdRow> table;
};

/// Scans the ascending scale grid, then bisects between the last converged and the first
/// diverged scale.
Threshold small_data_threshold(const QlpProblem& unit, const std::vector<double>& scales, const QlpOptions& opt = {},
                               int bisection_steps = 8);

struct CompositionCheck {
    double lhs;  // ||a o v||_{W^{r,p}(L_inf)}
    double rhs;  // ||v||^beta_{W^{r/beta, beta p}(L_inf)}
    double ratio;
    bool flagged;  // quadrature reliability flag from either side
};

CompositionCheck composition_regularity(const Trajectory& v, const std::function<double(double)>& a, double beta,
                                        double r, double p);

/// f = u*_t - a'(u*) (u*_x)^2 - a(u*) u*_xx for closed-form u*(t, x) and a(u).
struct Manufactured {
    Expression u_star;
    Expression a;
    std::function<double(double, double)> f;
};

Manufactured manufacture(const std::string& u_star, const std::string& a_of_u);

/// Problem for a manufactured solution on (0,1) with m steps and n interior nodes.
QlpProblem manufactured_problem(const Manufactured& mf, const CoefficientMap& a, double T, std::size_t m,
                                std::size_t n);

}  // namespace maxreg
