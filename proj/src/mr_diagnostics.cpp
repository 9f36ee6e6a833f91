#include "maxreg/mr_diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "maxreg/error.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/log.hpp"

namespace maxreg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

StateNorm norm_for(const std::optional<SpaceGrid>& g) {
    if (g) return StateNorm::grid_l2(g->interior_weights());
    return StateNorm::euclidean();
}

}  // namespace

MrConstant mr_parts(const OperatorSource& src, const Forcing& f, const Trajectory& u, const VectorXd& u0, double p) {
    const StateNorm nrm = norm_for(src.space);
    const Trajectory fn = f.nodal();
    std::vector<VectorXd> Au(u.size()), ud(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        Au[i] = src.at(i) * u[i];
        ud[i] = fn[i] - Au[i];
    }
    MrParts parts;
    parts.u_lp = bochner_norm(u, p, nrm);
    parts.Au_lp = bochner_norm(Trajectory(u.grid, std::move(Au)), p, nrm);
    parts.udot_lp = bochner_norm(Trajectory(u.grid, std::move(ud)), p, nrm);
    parts.f_lp = bochner_norm(fn, p, nrm);
    parts.trace = u0.isZero(0.0) ? 0.0 : trace_norm(src.at(0), u0, p, nrm);
    const double den = parts.f_lp + parts.trace;
    if (!(den > 0.0)) throw ValidationError("mr_constant: f and u0 are both zero, the ratio is undefined");
    const double C = (parts.w1p() + parts.Au_lp) / den;
    if (!std::isfinite(C)) throw NumericalError("mr_constant: non-finite ratio");
    return {C, parts};
}

MrConstant mr_constant(const OperatorFamily& fam, const Forcing& f, const VectorXd& u0, double p, Route route,
                       double theta) {
    if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("mr_constant: p must lie in [1, inf)");
    const Trajectory u = solve(fam, f, u0, route, theta, p);
    return mr_parts(source_of(fam), f, u, u0, p);
}

MrConstant mr_constant(const OperatorSource& src, const Forcing& f, const VectorXd& u0, double p, Scheme scheme) {
    if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("mr_constant: p must lie in [1, inf)");
    const Trajectory u = solve_timestepper(src, f, u0, scheme);
    return mr_parts(src, f, u, u0, p);
}

// ---------------------------------------------------------------- sweep

SweepTable critical_sweep(const SweepOptions& opt) {
    if (opt.alphas.empty()) throw ValidationError("critical_sweep: empty alpha list");
    if (opt.levels < 2) throw ValidationError("critical_sweep: need at least 2 refinement levels");
    if (!(opt.p >= 1.0)) throw ValidationError("critical_sweep: p must be >= 1");
    for (double a : opt.alphas)
        if (!(a > 0.0 && a <= 1.0)) throw ValidationError("critical_sweep: alpha must lie in (0,1]");

    SweepTable tab;
    for (double a : opt.alphas)
        for (int l = 0; l < opt.levels; ++l) {
            SweepCell c;
            c.alpha = a;
            c.level = l;
            c.K = opt.K0 + 2 * l;
            c.m = opt.m0 << (2 * l);
            c.n = (opt.n0 << l) - 1;
            c.dt = opt.T / double(c.m);
            c.C_p = std::numeric_limits<double>::quiet_NaN();
            tab.cells.push_back(c);
        }

    auto run_cell = [&](SweepCell& c) {
        try {
            std::string gname = opt.generator;
            if (gname == "auto") gname = c.alpha >= 1.0 ? "lipschitz" : "weierstrass";
            const gen::Generator g = gen::by_name(gname, c.alpha, c.K);
            const TimeGrid tg = TimeGrid::uniform(opt.T, c.m);
            const SpaceGrid sg = SpaceGrid::uniform(0.0, 1.0, c.n);
            // operators assembled per time node on demand: the finest levels are too long to store
            OperatorSource src{tg, c.n, true,
                               [&](std::size_t i) {
                                   VectorXd a(Eigen::Index(sg.n_nodes()));
                                   for (std::size_t j = 0; j < sg.n_nodes(); ++j) a(Eigen::Index(j)) = g.a(tg.t(i), sg.x(j));
                                   return assemble_from_nodal(a, sg).A;
                               },
                               sg};
            VectorXd f0(Eigen::Index(c.n));
            for (std::size_t j = 0; j < c.n; ++j) f0(Eigen::Index(j)) = std::sin(std::numbers::pi * sg.x(j + 1));
            std::vector<VectorXd> fv(c.m, f0);
            Forcing f(tg, fv, fv);
            c.C_p = mr_constant(src, f, VectorXd::Zero(Eigen::Index(c.n)), opt.p, opt.scheme).C_p;
        } catch (const std::exception& e) {
            c.C_p = std::numeric_limits<double>::quiet_NaN();
            c.error = e.what();
            log::warn(std::string("critical_sweep cell failed: ") + e.what());
        }
    };

    const long nc = long(tab.cells.size());
    if (opt.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < nc; ++k) run_cell(tab.cells[std::size_t(k)]);
    } else {
        for (long k = 0; k < nc; ++k) run_cell(tab.cells[std::size_t(k)]);
    }

    for (std::size_t ai = 0; ai < opt.alphas.size(); ++ai) {
        const SweepCell* row = &tab.cells[ai * std::size_t(opt.levels)];
        SweepVerdict v{opt.alphas[ai], "growing", std::numeric_limits<double>::quiet_NaN(), true};
        const double a = row[opt.levels - 2].C_p, b = row[opt.levels - 1].C_p;
        if (std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0) {
            v.drift = std::max(a, b) / std::min(a, b);
            v.verdict = v.drift < 2.0 ? "stable" : "growing";
        }
        for (int l = 1; l < opt.levels; ++l)
            if (!(row[l].C_p > row[l - 1].C_p)) v.monotone_growth = false;
        tab.verdicts.push_back(v);
    }
    return tab;
}

// ---------------------------------------------------------------- Kato

KatoRatio kato_ratio(const DiscreteOperator& A, const std::vector<VectorXd>& samples) {
    const SpaceGrid& g = A.grid;
    const std::size_t n = g.n_interior();
    if (A.order() != n) throw ValidationError("kato_ratio: operator does not match its grid");
    const StateNorm l2 = StateNorm::grid_l2(g.interior_weights());
    const MatrixXd R = frac_power(A.A, 0.5);
    KatoRatio out{std::numeric_limits<double>::infinity(), 0.0, 0};
    for (const auto& v : samples) {
        if (std::size_t(v.size()) != n) throw ValidationError("kato_ratio: sample dimension mismatch");
        if (v.isZero(0.0)) continue;
        // forward differences over all n+1 cells, Dirichlet zeros at both ends
        double grad2 = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            const double left = j == 0 ? 0.0 : v(Eigen::Index(j - 1));
            const double right = j == n ? 0.0 : v(Eigen::Index(j));
            const double h = g.x(j + 1) - g.x(j);
            grad2 += h * std::pow((right - left) / h, 2);
        }
        const double r = l2(R * v) / (l2(v) + std::sqrt(grad2));
        out.min_ratio = std::min(out.min_ratio, r);
        out.max_ratio = std::max(out.max_ratio, r);
        ++out.samples;
    }
    if (out.samples == 0) throw ValidationError("kato_ratio: no nonzero samples");
    return out;
}

KatoRatio kato_ratio(const DiscreteOperator& A, std::size_t random_samples, std::uint64_t seed) {
    const Eigen::Index n = Eigen::Index(A.order());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N01;
    std::vector<VectorXd> s;
    for (std::size_t k = 0; k < random_samples; ++k) {
        VectorXd v(n);
        for (Eigen::Index j = 0; j < n; ++j) v(j) = N01(rng);
        s.push_back(v);
    }
    if (auto sp = Spectral::try_decompose(A.A))
        for (Eigen::Index k = 0; k < n; ++k) s.push_back(sp->V.col(k));
    return kato_ratio(A, s);
}

}  // namespace maxreg
