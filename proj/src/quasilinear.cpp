#include "maxreg/quasilinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxreg/error.hpp"
#include "maxreg/log.hpp"

namespace maxreg {

using Eigen::VectorXd;

double CoefficientMap::operator()(double u) const { return std::clamp(raw(u), lo, hi); }

CoefficientMap CoefficientMap::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("constant coefficient must be positive and finite");
    CoefficientMap m;
    m.raw = [c](double) { return c; };
    m.lo = m.hi = c;
    m.label = std::to_string(c);
    m.u_independent = true;
    return m;
}

CoefficientMap CoefficientMap::from_expression(const std::string& src, double lo, double hi, Rational beta) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw ValidationError("coefficient bounds need 0 < lo <= hi < inf");
    Expression e = Expression::parse(src);
    if (e.depends_on('t') || e.depends_on('x'))
        throw ValidationError("coefficient map '" + src + "' may only depend on u");
    CoefficientMap m;
    m.raw = [e](double u) { return e.eval(0.0, 0.0, u); };
    m.lo = lo;
    m.hi = hi;
    m.beta = beta;
    m.label = src;
    m.u_independent = !e.depends_on('u');
    return m;
}

void QlpProblem::validate() const {
    if (!a.raw) throw ValidationError("qlp: coefficient map missing");
    if (!(a.lo > 0.0)) throw ValidationError("qlp: ellipticity floor must be positive");
    if (!(a.beta > Rational(1, 2) && a.beta <= 1))
        throw ValidationError("qlp: beta must lie in (1/2, 1], got " + to_string(a.beta));
    if (!(q > 1)) throw ValidationError("qlp: q must exceed the space dimension 1");
    const Rational need = q / (2 * q - 1);
    if (!(a.beta > need))
        throw ValidationError("qlp: beta = " + to_string(a.beta) + " must exceed q/(2q-1) = " + to_string(need));
    if (!tg.same_as(f.grid)) throw ValidationError("qlp: forcing lives on a different time grid");
    if (f.dim() != sg.n_interior() || std::size_t(u0.size()) != sg.n_interior())
        throw ValidationError("qlp: forcing / initial value dimension does not match the space grid");
    if (!(p > 1.0)) throw ValidationError("qlp: p must exceed 1");
    if (!(monitor_order > 0.0 && monitor_order < 1.0)) throw ValidationError("qlp: monitor order must lie in (0,1)");
}

QlpProblem QlpProblem::scaled(double s) const {
    QlpProblem out = *this;
    for (auto& v : out.f.values) v *= s;
    out.u0 *= s;
    return out;
}

Trajectory apply_frozen(const QlpProblem& prob, const Trajectory& v, Scheme scheme) {
    const SpaceGrid& sg = prob.sg;
    const std::size_t n = sg.n_interior();
    const double a_bdry = prob.a(0.0);
    OperatorSource src{prob.tg, n, true,
                       [&](std::size_t i) {
                           VectorXd an(Eigen::Index(n + 2));
                           an(0) = a_bdry;
                           an(Eigen::Index(n + 1)) = a_bdry;
                           for (std::size_t j = 0; j < n; ++j) an(Eigen::Index(j + 1)) = prob.a(v[i](Eigen::Index(j)));
                           return assemble_from_nodal(an, sg).A;
                       },
                       sg};
    return solve_timestepper(src, Forcing::from_trajectory(prob.f), prob.u0, scheme);
}

namespace {

double sup_diff(const Trajectory& a, const Trajectory& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return m;
}

void check_probe(const QlpProblem& prob, const Trajectory& v) {
    if (std::isinf(prob.probe_M)) return;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (Eigen::Index j = 0; j < v[i].size(); ++j)
            if (std::abs(v[i](j)) > prob.probe_M) {
                std::ostringstream os;
                os << "qlp: iterate leaves the probed range |u| <= " << prob.probe_M << " at t = " << prob.tg.t(i)
                   << ", x = " << prob.sg.x(std::size_t(j) + 1) << ", u = " << v[i](j);
                throw NumericalError(os.str());
            }
}

}  // namespace

QlpResult solve_qlp(const QlpProblem& prob, const QlpOptions& opt) {
    prob.validate();
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ValidationError("qlp: damping must lie in (0,1]");
    if (!(opt.tol > 0.0)) throw ValidationError("qlp: tol must be positive");
    if (opt.max_iter == 0) throw ValidationError("qlp: max_iter must be positive");

    Trajectory v = Trajectory::zeros(prob.tg, prob.sg.n_interior());
    Trajectory Sv = apply_frozen(prob, v, opt.scheme);
    QlpResult res{v, 0, false, {}, std::numeric_limits<double>::quiet_NaN(), false, "max_iter", std::nullopt,
                  std::nullopt};
    double prev_monitor = -1.0;
    int growth_run = 0;
    for (std::size_t k = 1; k <= opt.max_iter; ++k) {
        if (opt.damping == 1.0) {
            v = Sv;
        } else {
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - opt.damping) * v[i] + opt.damping * Sv[i];
        }
        check_probe(prob, v);
        Sv = apply_frozen(prob, v, opt.scheme);
        const double r = sup_diff(Sv, v);
        res.residuals.push_back(r);
        res.iterations = k;
        log::debug("qlp iteration " + std::to_string(k) + " residual " + std::to_string(r));
        if (!std::isfinite(r) || r > 1e12) {
            res.stop_reason = "diverged";
            break;
        }
        if (r < opt.tol) {
            res.converged = true;
            res.certificate = r;
            res.stop_reason = "tol";
            break;
        }
        if (opt.diagnostics && prob.tg.uniform() && prob.tg.m_steps() >= 4) {
            const double mon = frac_sobolev_norm(v, prob.monitor_order, prob.p, StateNorm::sup()).value;
            growth_run = mon > prev_monitor ? growth_run + 1 : 0;
            prev_monitor = mon;
            if (growth_run >= 5 && !res.ball_warning) {
                res.ball_warning = true;
                log::warn("qlp: iterate norm grew for 5 consecutive iterations");
            }
        }
    }
    res.u = v;
    if (res.converged && opt.diagnostics) {
        const std::size_t n = prob.sg.n_interior();
        const double a_bdry = prob.a(0.0);
        const Trajectory& u = res.u;
        OperatorSource src{prob.tg, n, true,
                           [&](std::size_t i) {
                               VectorXd an(Eigen::Index(n + 2));
                               an(0) = a_bdry;
                               an(Eigen::Index(n + 1)) = a_bdry;
                               for (std::size_t j = 0; j < n; ++j) an(Eigen::Index(j + 1)) = prob.a(u[i](Eigen::Index(j)));
                               return assemble_from_nodal(an, prob.sg).A;
                           },
                           prob.sg};
        try {
            res.mr = mr_parts(src, Forcing::from_trajectory(prob.f), u, prob.u0, prob.p).parts;
        } catch (const ValidationError&) {
            // zero data: the ratio is undefined, the parts are not needed
        }
        if (prob.tg.uniform() && prob.tg.n_nodes() >= 3) res.holder = holder_modulus(u, StateNorm::sup());
    }
    return res;
}

Threshold small_data_threshold(const QlpProblem& unit, const std::vector<double>& scales, const QlpOptions& opt,
                               int bisection_steps) {
    if (scales.empty()) throw ValidationError("small_data_threshold: empty scale grid");
    if (!std::is_sorted(scales.begin(), scales.end()) || scales.front() < 0.0)
        throw ValidationError("small_data_threshold: scales must be nonnegative and ascending");
    QlpOptions o = opt;
    o.diagnostics = false;
    auto run = [&](double s) -> ThresholdRow {
        try {
            const QlpResult r = solve_qlp(unit.scaled(s), o);
            return {s, r.converged, r.iterations};
        } catch (const NumericalError& e) {
            log::info(std::string("small_data_threshold: scale treated as diverged: ") + e.what());
            return {s, false, 0};
        }
    };
    Threshold th{0.0, false, true, {}};
    for (double s : scales) th.table.push_back(run(s));
    bool seen_div = false;
    for (const auto& row : th.table) {
        if (!row.converged) seen_div = true;
        else if (seen_div) th.monotone = false;
    }
    auto first_div = std::find_if(th.table.begin(), th.table.end(), [](const ThresholdRow& r) { return !r.converged; });
    if (first_div == th.table.end()) {
        th.value = scales.back();
        th.cap = true;
        return th;
    }
    if (first_div == th.table.begin()) return th;
    double lo = std::prev(first_div)->scale, hi = first_div->scale;
    for (int k = 0; k < bisection_steps; ++k) {
        const double mid = 0.5 * (lo + hi);
        (run(mid).converged ? lo : hi) = mid;
    }
    th.value = lo;
    return th;
}

CompositionCheck composition_regularity(const Trajectory& v, const std::function<double(double)>& a, double beta,
                                        double r, double p) {
    if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("composition_regularity: beta must lie in (0,1]");
    if (!(r > 0.0 && r < beta)) throw ValidationError("composition_regularity: r must lie in (0, beta)");
    if (!(beta * p > 1.0)) throw ValidationError("composition_regularity: beta p must exceed 1");
    std::vector<VectorXd> av(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) av[i] = v[i].unaryExpr(a);
    const Trajectory comp(v.grid, std::move(av));
    const FracNorm L = frac_sobolev_norm(comp, r, p, StateNorm::sup());
    const FracNorm R = frac_sobolev_norm(v, r / beta, beta * p, StateNorm::sup());
    CompositionCheck c;
    c.lhs = L.value;
    c.rhs = std::pow(R.value, beta);
    c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : (c.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    c.flagged = L.unreliable || R.unreliable;
    return c;
}

Manufactured manufacture(const std::string& u_star, const std::string& a_of_u) {
    Expression u = Expression::parse(u_star);
    if (u.depends_on('u')) throw ValidationError("manufactured solution may only depend on t and x");
    Expression a = Expression::parse(a_of_u);
    if (a.depends_on('t') || a.depends_on('x')) throw ValidationError("coefficient map may only depend on u");
    const Expression ut = u.derivative('t'), ux = u.derivative('x'), uxx = ux.derivative('x');
    const Expression da = a.derivative('u');
    auto f = [u, a, ut, ux, uxx, da](double t, double x) {
        const double w = u.eval(t, x), gx = ux.eval(t, x);
        return ut.eval(t, x) - da.eval(0.0, 0.0, w) * gx * gx - a.eval(0.0, 0.0, w) * uxx.eval(t, x);
    };
    return {u, a, f};
}

QlpProblem manufactured_problem(const Manufactured& mf, const CoefficientMap& a, double T, std::size_t m,
                                std::size_t n) {
    const TimeGrid tg = TimeGrid::uniform(T, m);
    const SpaceGrid sg = SpaceGrid::uniform(0.0, 1.0, n);
    Trajectory f = Trajectory::from_function(tg, [&](double t) {
        VectorXd v = VectorXd::Zero(Eigen::Index(n));
        for (std::size_t j = 0; j < n; ++j) v(Eigen::Index(j)) = mf.f(t, sg.x(j + 1));
        return v;
    });
    VectorXd u0 = VectorXd::Zero(Eigen::Index(n));
    for (std::size_t j = 0; j < n; ++j) u0(Eigen::Index(j)) = mf.u_star.eval(0.0, sg.x(j + 1));
    return QlpProblem{a, tg, sg, std::move(f), u0};
}

}  // namespace maxreg
