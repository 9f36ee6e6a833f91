// Acceptance run: one PASS/FAIL line per criterion, runtime limits included.
//
//     maxreg_acceptance        all criteria
//     maxreg_acceptance 3 7    selected criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../common/golden.hpp"
#include "maxreg/counterexample.hpp"
#include "maxreg/exponent_planner.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/mr_diagnostics.hpp"
#include "maxreg/norms.hpp"
#include "maxreg/quasilinear.hpp"
#include "maxreg/volterra.hpp"

using namespace maxreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char b[64];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

Forcing scalar_forcing(const TimeGrid& tg, double c) {
    return Forcing::from_trajectory(Trajectory::scalar(tg, [c](double) { return c; }));
}

OperatorFamily scalar_family(const TimeGrid& tg, double a) {
    OperatorFamily f(tg, std::vector<MatrixXd>(tg.n_nodes(), MatrixXd::Constant(1, 1, a)));
    f.set_certificate({RegularityCertificate::Kind::holder, 1.0, 0.0, 0.0});
    return f;
}

Outcome closed_forms() {
    const TimeGrid tg = TimeGrid::uniform(1.0, 1000);
    const auto fam = scalar_family(tg, 1.0);
    std::ostringstream d;
    bool ok = true;
    for (Route r : {Route::integral, Route::midpoint}) {
        const auto u = solve(fam, scalar_forcing(tg, 1.0), VectorXd::Zero(1), r);
        double e = 0;
        for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i](0) - (1 - std::exp(-tg.t(i)))));
        ok = ok && e <= 1e-6;
        d << to_string(r) << " max err " << fmt("%.2e", e) << "  ";
    }
    return {ok, d.str()};
}

// L2(0,T; grid L2) distance between two trajectories on the same grid
double l2_diff(const Trajectory& a, const Trajectory& b, const StateNorm& n) {
    std::vector<VectorXd> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
    return bochner_norm(Trajectory(a.grid, d), 2.0, n);
}

Outcome route_equivalence() {
    const SpaceGrid sg = SpaceGrid::uniform(0.0, 1.0, 49);
    const StateNorm norm = StateNorm::grid_l2(sg.interior_weights());
    const auto g = gen::lipschitz();
    const std::vector<std::size_t> ms{25, 50, 100};
    std::vector<double> diff, self;
    auto build = [&](std::size_t m) {
        const TimeGrid tg = TimeGrid::uniform(1.0, m);
        auto fam = OperatorFamily::from_field(CoefficientField::from_real_function(tg, sg, g.a, g.delta));
        fam.set_certificate({RegularityCertificate::Kind::holder, 1.0, 0.0, 0.0});
        return fam;
    };
    auto forcing = [&](const TimeGrid& tg) {
        return Forcing::from_trajectory(Trajectory::from_function(tg, [&](double) {
            VectorXd v(static_cast<Eigen::Index>(sg.n_interior()));
            for (std::size_t j = 0; j < sg.n_interior(); ++j) v(Eigen::Index(j)) = std::sin(M_PI * sg.x(j + 1));
            return v;
        }));
    };
    const VectorXd u0 = VectorXd::Zero(Eigen::Index(sg.n_interior()));
    std::ostringstream d;
    bool ok = true;
    for (std::size_t m : ms) {
        const auto fam = build(m);
        const auto fine = build(2 * m);
        const auto ui = solve(fam, forcing(fam.time_grid()), u0, Route::integral);
        const auto um = solve(fam, forcing(fam.time_grid()), u0, Route::midpoint);
        const auto uf = solve(fine, forcing(fine.time_grid()), u0, Route::midpoint);
        std::vector<VectorXd> coarse;
        for (std::size_t i = 0; i <= m; ++i) coarse.push_back(uf[2 * i]);
        const double dd = l2_diff(ui, um, norm);
        const double se = l2_diff(um, Trajectory(fam.time_grid(), coarse), norm);
        diff.push_back(dd);
        self.push_back(se);
        ok = ok && dd <= 3.0 * se;
        d << "m=" << m << " diff " << fmt("%.2e", dd) << " self " << fmt("%.2e", se) << "  ";
    }
    double order = 1e300;
    for (std::size_t k = 0; k + 1 < diff.size(); ++k) order = std::min(order, std::log2(diff[k] / diff[k + 1]));
    ok = ok && order >= 1.0;
    d << "min order " << fmt("%.3f", order);
    return {ok, d.str()};
}

Outcome kernel_slopes() {
    // resolution: the series is cut at K = log2 m, the finest frequency the time grid samples
    const std::size_t m = 512, n = 49;
    const int K = 9;
    const double theta = 0.5, alpha = 0.7;
    const auto g = gen::weierstrass(alpha, K);
    const TimeGrid tg = TimeGrid::uniform(1.0, m);
    const SpaceGrid sg = SpaceGrid::uniform(0.0, 1.0, n);
    const auto fam = OperatorFamily::from_field(CoefficientField::from_real_function(tg, sg, g.a, g.delta));
    const auto k1 = kernel_slope_K1(fam, theta);
    const auto k2 = kernel_slope_K2(fam, theta);
    const bool ok = k1.slope >= alpha - 1 - 0.1 && k2.slope >= -theta - 0.1;
    return {ok, "K1 slope " + fmt("%.4f", k1.slope) + " (>= -0.4)  K2 slope " + fmt("%.4f", k2.slope) +
                    " (>= -0.6)  fit window h <= " + fmt("%.4f", k1.h_fit_max)};
}

Outcome planner_golden() {
    const auto rows = testing::load_planner_golden(MAXREG_TEST_DATA "/planner_golden.csv");
    std::size_t agree = 0;
    for (const auto& r : rows) {
        ExponentQuery q{parse_rational(r.theta), parse_rational(r.p), parse_rational(r.alpha), std::nullopt};
        if (!r.q.empty()) q.q = parse_rational(r.q);
        const auto res = mr_admissible(q);
        agree += (res.admissible ? "admissible" : "inadmissible") == r.verdict && res.rule == r.rule &&
                 to_string(res.q_required) == r.q_required;
    }
    return {rows.size() == 200 && agree == rows.size(),
            std::to_string(agree) + "/" + std::to_string(rows.size()) + " verdicts agree"};
}

Outcome frac_norm_oracle() {
    const TimeGrid tg = TimeGrid::uniform(1.0, 400);
    const double v = frac_sobolev_norm(Trajectory::scalar(tg, [](double t) { return t; }), 0.5, 2.0).value;
    const double c = frac_sobolev_norm(Trajectory::scalar(tg, [](double) { return 0.25; }), 0.5, 2.0).value;
    return {std::abs(v - 1.0) <= 1e-3 && c == 0.0,
            "norm of t " + fmt("%.6f", v) + "  constant " + fmt("%g", c)};
}

Outcome counterexample() {
    std::ostringstream d;
    bool ok = true;
    for (const auto& r : critical::derivative_norm_truncated({1e-4, 1e-6, 1e-8})) {
        const double rel = std::abs(r.I - r.closed_form) / r.closed_form;
        ok = ok && rel <= 0.01;
        d << "I(" << fmt("%.0e", r.eps) << ") rel " << fmt("%.1e", rel) << "  ";
    }
    const auto sweep = critical::critical_frac_sweep(critical::CriticalExample{}, {3.0, 2.5, 2.2, 2.05});
    const auto& q3 = sweep.front();
    ok = ok && std::isfinite(q3.value) && q3.drift <= 0.10;
    d << "q=3 " << fmt("%.4f", q3.value) << " drift " << fmt("%.2f%%", 100 * q3.drift);
    for (std::size_t k = 1; k < sweep.size(); ++k) {
        ok = ok && sweep[k].value > sweep[k - 1].value;
        d << "  q=" << fmt("%g", sweep[k].q) << " " << fmt("%.4f", sweep[k].value);
    }
    return {ok, d.str()};
}

Outcome critical_sweep_trend() {
    const auto tab = critical_sweep(SweepOptions{});
    std::ostringstream d;
    bool ok = tab.verdicts.size() == 2;
    for (const auto& c : tab.cells) {
        ok = ok && std::isfinite(c.C_p);
        d << "a=" << fmt("%g", c.alpha) << "/L" << c.level << " " << fmt("%.4f", c.C_p) << "  ";
    }
    for (const auto& v : tab.verdicts) {
        if (v.alpha == 1.0) ok = ok && v.drift < 2.0 && v.verdict == "stable";
        if (v.alpha == 0.3) ok = ok && v.monotone_growth;
        d << "[a=" << fmt("%g", v.alpha) << " " << v.verdict << " drift " << fmt("%.3f", v.drift)
          << (v.monotone_growth ? " growing" : " not growing") << "] ";
    }
    return {ok, d.str()};
}

Outcome quasilinear() {
    const auto mf = manufacture("t*x*(1-x)", "1 + u^2/(1+u^2)");
    const auto a = CoefficientMap::from_expression("1 + u^2/(1+u^2)", 1.0, 2.0);
    const std::size_t m = 100, n = 31;
    const auto prob = manufactured_problem(mf, a, 1.0, m, n);
    const auto r = solve_qlp(prob);
    // the linear scheme on the same grid: coefficient frozen at the exact solution
    const auto exact = Trajectory::from_function(prob.tg, [&](double t) {
        VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) v(Eigen::Index(j)) = mf.u_star.eval(t, prob.sg.x(j + 1));
        return v;
    });
    const auto lin = apply_frozen(prob, exact);
    double eq = 0, el = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        eq = std::max(eq, (r.u[i] - exact[i]).cwiseAbs().maxCoeff());
        el = std::max(el, (lin[i] - exact[i]).cwiseAbs().maxCoeff());
    }
    const auto one = solve_qlp(manufactured_problem(manufacture("t*x*(1-x)", "1"), CoefficientMap::constant(1.0),
                                                    1.0, m, n));
    const bool ok = r.converged && eq <= 5.0 * el && one.converged && one.iterations == 1;
    return {ok, "qlp err " + fmt("%.3e", eq) + "  linear err " + fmt("%.3e", el) + "  ratio " + fmt("%.3f", eq / el) +
                    "  picard its " + std::to_string(r.iterations) + "  a=1 its " + std::to_string(one.iterations)};
}

Outcome initial_value_extension() {
    const TimeGrid tg = TimeGrid::uniform(1.0, 400);
    const auto fam = scalar_family(tg, 1.0);
    const auto ext = extend_initial_value(fam, Forcing::zeros(tg, 1), VectorXd::Ones(1), 2.0);
    const auto w = solve_timestepper(ext.B, ext.g, VectorXd::Zero(1));
    const auto u = restrict_middle(ext, w, tg);
    double e = 0;
    for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i](0) - std::exp(-tg.t(i))));
    double te = 0;
    for (double lam : {1.0, 4.0, 10.0})
        te = std::max(te, std::abs(trace_norm(MatrixXd::Constant(1, 1, lam), VectorXd::Ones(1), 2.0) -
                                   (1 + std::sqrt(lam / 2))));
    return {e <= 1e-4 && te <= 1e-6, "window err " + fmt("%.2e", e) + "  trace err " + fmt("%.2e", te)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "autonomous closed forms", 1, closed_forms},
        {2, "route equivalence", 30, route_equivalence},
        {3, "kernel estimate slopes", 60, kernel_slopes},
        {4, "exponent planner golden table", 1, planner_golden},
        {5, "fractional norm oracle", 5, frac_norm_oracle},
        {6, "counterexample properties", 120, counterexample},
        {7, "critical sweep trend", 300, critical_sweep_trend},
        {8, "quasilinear manufactured solution", 60, quasilinear},
        {9, "initial value extension", 1, initial_value_extension},
    };
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && s < c.limit_s;
        failed += !pass;
        std::printf("criterion %d %s: %s  %s  [%.2f s, limit %.0f s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), s, c.limit_s);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
