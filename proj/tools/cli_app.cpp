#include "cli_app.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "maxreg/config.hpp"
#include "maxreg/counterexample.hpp"
#include "maxreg/discretization.hpp"
#include "maxreg/error.hpp"
#include "maxreg/exponent_planner.hpp"
#include "maxreg/expression.hpp"
#include "maxreg/generators.hpp"
#include "maxreg/kernels.hpp"
#include "maxreg/log.hpp"
#include "maxreg/mr_diagnostics.hpp"
#include "maxreg/norms.hpp"
#include "maxreg/quasilinear.hpp"
#include "maxreg/report.hpp"
#include "maxreg/volterra.hpp"

namespace maxreg::cli {

namespace fs = std::filesystem;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

struct Problem {
    OperatorFamily fam;
    Forcing f;
    VectorXd u0;
    bool scalar;
    std::optional<CoefficientField> field;  // interval problems only
};

gen::Generator generator_from(const RunConfig& c) {
    const std::string name = c.str("solve", "generator");
    if (name == "expression") return gen::expression(c.str("solve", "expression"), c.num("solve", "delta"));
    return gen::by_name(name, c.num("solve", "alpha"), int(c.integer("solve", "K")), c.num("solve", "c"));
}

Problem build_problem(const RunConfig& c) {
    const double T = c.num("grid", "T");
    const std::size_t m = c.count("grid", "m");
    const std::string space = c.str("solve", "space");
    const Expression u0e = Expression::parse(c.str("solve", "u0"));
    const Expression fe = Expression::parse(c.str("solve", "forcing"));
    if (u0e.depends_on('t') || u0e.depends_on('u')) throw ValidationError("[solve] u0 may only depend on x");
    if (fe.depends_on('u')) throw ValidationError("[solve] forcing may not depend on u");

    if (space == "scalar") {
        const gen::Generator g = generator_from(c);
        const TimeGrid tg = TimeGrid::uniform(T, m);
        OperatorFamily fam = OperatorFamily::from_function(tg, [&](double t) {
            Eigen::MatrixXd A(1, 1);
            A(0, 0) = g.a(t, 0.0);
            return A;
        });
        fam.set_certificate({RegularityCertificate::Kind::holder, g.holder_alpha, 0.0, 0.0});
        Trajectory f = Trajectory::scalar(tg, [&](double t) { return fe.eval(t, 0.0); });
        VectorXd u0 = VectorXd::Constant(1, u0e.eval(0.0, 0.0));
        return {std::move(fam), Forcing::from_trajectory(f), u0, true, std::nullopt};
    }
    if (space != "interval") throw ValidationError("[solve] space must be interval or scalar");

    const std::string csv = c.str("solve", "coefficient_csv");
    std::optional<CoefficientField> field;
    double cert_alpha = 1.0;
    if (!csv.empty()) {
        field.emplace(load_coefficient_csv(csv, c.num("solve", "delta")));
        if (!field->time_grid().uniform()) log::warn("coefficient CSV has a nonuniform time grid");
        cert_alpha = c.num("solve", "alpha");
    } else {
        const gen::Generator g = generator_from(c);
        const TimeGrid tg = TimeGrid::uniform(T, m);
        const SpaceGrid sg = SpaceGrid::uniform(0.0, 1.0, c.count("grid", "n"));
        field.emplace(CoefficientField::from_real_function(tg, sg, g.a, g.delta));
        cert_alpha = g.holder_alpha;
    }
    const auto ell = ellipticity_check(*field);
    if (!ell.pass) throw ValidationError("coefficient field fails the ellipticity floor");
    OperatorFamily fam = OperatorFamily::from_field(*field);
    fam.set_certificate({RegularityCertificate::Kind::holder, cert_alpha, 0.0, 0.0});
    const TimeGrid& tg = field->time_grid();
    const SpaceGrid& sg = field->space_grid();
    const std::size_t n = sg.n_interior();
    Trajectory f = Trajectory::from_function(tg, [&](double t) {
        VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) v(Eigen::Index(j)) = fe.eval(t, sg.x(j + 1));
        return v;
    });
    VectorXd u0(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) u0(Eigen::Index(j)) = u0e.eval(0.0, sg.x(j + 1));
    return {std::move(fam), Forcing::from_trajectory(f), u0, false, std::move(field)};
}

StateNorm state_norm(const OperatorFamily& fam) {
    if (fam.space_grid()) return StateNorm::grid_l2(fam.space_grid()->interior_weights());
    return StateNorm::euclidean();
}

json vec(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
    return a;
}

json plan_json(const PlanResult& r) {
    json j;
    j["verdict"] = r.admissible ? "admissible" : "inadmissible";
    j["rule"] = r.rule;
    j["q_required"] = to_string(r.q_required);
    j["alpha_threshold"] = to_string(r.alpha_threshold);
    j["flags"] = r.flags;
    j["trace"] = r.trace;
    json lad = json::array();
    for (const auto& g : r.ladder)
        lad.push_back({{"p", to_string(g.p)},
                       {"q", g.any_finite_q ? std::string("any finite") : to_string(g.q)},
                       {"rule", g.rule},
                       {"binding", g.binding}});
    j["ladder"] = lad;
    return j;
}

// ---------------------------------------------------------------- subcommands

void cmd_solve(const RunConfig& c, Report& rep, const std::string& out) {
    const Problem P = build_problem(c);
    const Route route = route_from_string(c.str("solve", "route"));
    const Trajectory u = solve(P.fam, P.f, P.u0, route, c.num("solve", "theta"), c.num("solve", "p"),
                               kernel_quadrature_from_string(c.str("solve", "rule")));
    json& s = rep.stage("solve");
    s["route"] = to_string(route);
    s["m"] = u.grid.m_steps();
    s["dim"] = u.dim();
    s["T"] = u.grid.T();
    if (P.scalar) s["u_T"] = jnum(u.values.back()(0));
    else s["u_T"] = vec(u.values.back());
    double umax = 0.0;
    for (const auto& v : u.values) umax = std::max(umax, v.cwiseAbs().maxCoeff());
    s["max_abs_u"] = jnum(umax);
    save_trajectory_csv(u, (fs::path(out) / "solution.csv").string());
}

void cmd_diagnose(const RunConfig& c, Report& rep, const std::string& out) {
    Problem P = build_problem(c);
    const double alpha = c.num("diagnose", "alpha"), p = c.num("diagnose", "p"), theta = c.num("diagnose", "theta");
    const Route route = route_from_string(c.str("solve", "route"));
    const StateNorm nrm = state_norm(P.fam);

    const MrConstant mr = mr_constant(P.fam, P.f, P.u0, p, route, theta);
    rep.stage("mr_constant") = {{"C_p", jnum(mr.C_p)},     {"u_lp", jnum(mr.parts.u_lp)},
                                {"udot_lp", jnum(mr.parts.udot_lp)}, {"Au_lp", jnum(mr.parts.Au_lp)},
                                {"f_lp", jnum(mr.parts.f_lp)}, {"trace", jnum(mr.parts.trace)}};

    const Trajectory u = solve(P.fam, P.f, P.u0, route, theta, p);
    const RegularityReport rr = regularity_report(u, alpha, p, nrm);
    rep.stage("solution_regularity") = {{"holder_alpha", jnum(rr.holder.alpha)},
                                        {"holder_C", jnum(rr.holder.C)},
                                        {"frac_seminorm", jnum(rr.frac.value)},
                                        {"frac_full", jnum(rr.frac_full)},
                                        {"band_share", jnum(rr.frac.band_share)},
                                        {"unreliable", rr.frac.unreliable},
                                        {"norm", rr.norm_label}};

    const HolderFit hf = holder_modulus(P.fam.time_grid(), operator_increments(P.fam.operators()));
    const FracNorm ff = frac_sobolev_norm(P.fam.time_grid(), operator_increments(P.fam.operators()), alpha, p);
    rep.stage("operator_regularity") = {{"holder_alpha", jnum(hf.alpha)},
                                        {"holder_C", jnum(hf.C)},
                                        {"frac_seminorm", jnum(ff.value)},
                                        {"frac_unreliable", ff.unreliable}};

    const double K = theta_stability_constant(P.fam, theta);
    const SlopeFit k1 = kernel_slope_K1(P.fam, theta), k2 = kernel_slope_K2(P.fam, theta);
    rep.stage("kernels") = {{"theta", theta},         {"stability_K", jnum(K)},   {"K1_slope", jnum(k1.slope)},
                            {"K2_slope", jnum(k2.slope)}, {"K1_target", alpha - 1.0}, {"K2_target", -theta}};
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < k1.h.size(); ++i) rows.push_back({k1.h[i], k1.sup_norm[i], k2.sup_norm[i]});
        write_csv((fs::path(out) / "kernel_slopes.csv").string(), {"h", "K1_sup", "K2_sup"}, rows);
    }

    const SectorReport sr = sectoriality_report(Eigen::MatrixXcd(P.fam.A(0).cast<std::complex<double>>()),
                                                c.num("diagnose", "sector_angle"));
    rep.stage("sectoriality") = {{"phi", sr.phi},
                                 {"bound", jnum(sr.bound)},
                                 {"eigenvalues_in_sector", sr.eigenvalues_in_sector},
                                 {"note", sr.note}};

    if (P.field) {
        const SpaceGrid& sg = P.field->space_grid();
        const DiscreteOperator A0{P.fam.A(0), sg, 0.0};
        const KatoRatio kr = kato_ratio(A0, c.count("diagnose", "kato_samples"), std::uint64_t(c.integer("run", "seed")));
        rep.stage("kato") = {{"min_ratio", jnum(kr.min_ratio)}, {"max_ratio", jnum(kr.max_ratio)}, {"samples", kr.samples}};
        // uniform in t: worst time row of the field
        const std::vector<double> radii = c.list("diagnose", "vmo_radii");
        std::vector<double> eta(radii.size(), 0.0);
        for (std::size_t i = 0; i < P.field->time_grid().n_nodes(); ++i) {
            const VectorXd row = P.field->real_row(i);
            const auto e = vmo_modulus(std::span<const double>(row.data(), std::size_t(row.size())), sg, radii);
            for (std::size_t k = 0; k < eta.size(); ++k) eta[k] = std::max(eta[k], e[k]);
        }
        json v = json::array();
        for (std::size_t i = 0; i < radii.size(); ++i) v.push_back({{"r", radii[i]}, {"eta", jnum(eta[i])}});
        rep.stage("vmo") = v;
    }

    ExponentQuery q{parse_rational(c.str("diagnose", "theta")), parse_rational(c.str("diagnose", "p")),
                    parse_rational(c.str("diagnose", "alpha")), std::nullopt};
    rep.stage("plan") = plan_json(mr_admissible(q));
}

void cmd_sweep(const RunConfig& c, Report& rep, const std::string& out) {
    SweepOptions o;
    o.alphas = c.list("sweep", "alphas");
    o.generator = c.str("sweep", "generator");
    o.levels = int(c.integer("sweep", "levels"));
    o.K0 = int(c.integer("sweep", "K0"));
    o.m0 = c.count("sweep", "m0");
    o.n0 = c.count("sweep", "n0");
    o.T = c.num("grid", "T");
    o.p = c.num("sweep", "p");
    o.theta = c.num("sweep", "theta");
    const SweepTable tab = critical_sweep(o);
    std::vector<std::vector<double>> rows;
    json cells = json::array();
    for (const auto& cell : tab.cells) {
        rows.push_back({cell.alpha, double(cell.level), double(cell.K), double(cell.m), double(cell.n), cell.dt, cell.C_p});
        if (!cell.error.empty()) throw NumericalError("sweep cell alpha=" + std::to_string(cell.alpha) + " level=" +
                                                      std::to_string(cell.level) + ": " + cell.error);
        cells.push_back({{"alpha", cell.alpha}, {"level", cell.level}, {"C_p", jnum(cell.C_p)}});
    }
    write_csv((fs::path(out) / "sweep.csv").string(), {"alpha", "level", "K", "m", "n", "dt", "C_p"}, rows);
    json v = json::array();
    for (const auto& s : tab.verdicts)
        v.push_back({{"alpha", s.alpha}, {"verdict", s.verdict}, {"drift", jnum(s.drift)}, {"monotone_growth", s.monotone_growth}});
    rep.stage("sweep") = {{"cells", cells}, {"verdicts", v}};
}

void cmd_plan(const RunConfig& c, Report& rep) {
    ExponentQuery q{c.rational("plan", "theta"), c.rational("plan", "p"), c.rational("plan", "alpha"), std::nullopt};
    if (!c.str("plan", "q").empty()) q.q = c.rational("plan", "q");
    const PlanResult r = mr_admissible(q);
    const PlanResult lad = bootstrap_ladder(q.theta, q.p, q.alpha);
    for (const auto& line : r.trace) std::cout << line << "\n";
    std::cout << "verdict: " << (r.admissible ? "admissible" : "inadmissible") << ", case (" << r.rule
              << "), q = " << to_string(r.q_required) << "\n";
    for (const auto& line : lad.trace) std::cout << "ladder: " << line << "\n";
    json j = plan_json(r);
    j["bootstrap"] = plan_json(lad);
    std::cout << j.dump() << "\n";
    rep.stage("plan") = j;
}

void cmd_qlp(const RunConfig& c, Report& rep, const std::string& out) {
    const Manufactured mf = manufacture(c.str("qlp", "u_star"), c.str("qlp", "a"));
    const CoefficientMap a = CoefficientMap::from_expression(c.str("qlp", "a"), c.num("qlp", "a_lo"),
                                                             c.num("qlp", "a_hi"), c.rational("qlp", "beta"));
    QlpProblem P = manufactured_problem(mf, a, c.num("grid", "T"), c.count("qlp", "m"), c.count("qlp", "n"));
    P.q = c.rational("qlp", "q");
    QlpOptions o;
    o.tol = c.num("qlp", "tol");
    o.max_iter = c.count("qlp", "max_iter");
    o.damping = c.num("qlp", "damping");
    const QlpResult r = solve_qlp(P, o);
    double err = 0.0;
    for (std::size_t i = 0; i < r.u.size(); ++i)
        for (std::size_t j = 0; j < P.sg.n_interior(); ++j)
            err = std::max(err, std::abs(r.u[i](Eigen::Index(j)) - mf.u_star.eval(P.tg.t(i), P.sg.x(j + 1))));
    json& s = rep.stage("qlp");
    s = {{"converged", r.converged}, {"iterations", r.iterations}, {"stop_reason", r.stop_reason},
         {"certificate", jnum(r.certificate)}, {"ball_warning", r.ball_warning}, {"linf_error", jnum(err)}};
    if (r.mr)
        s["mr_parts"] = {{"u_lp", jnum(r.mr->u_lp)}, {"udot_lp", jnum(r.mr->udot_lp)}, {"Au_lp", jnum(r.mr->Au_lp)},
                         {"f_lp", jnum(r.mr->f_lp)}, {"trace", jnum(r.mr->trace)}};
    if (r.holder) s["holder"] = {{"alpha", jnum(r.holder->alpha)}, {"C", jnum(r.holder->C)}};
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.residuals.size(); ++k) rows.push_back({double(k + 1), r.residuals[k]});
    write_csv((fs::path(out) / "qlp_residuals.csv").string(), {"iteration", "residual"}, rows);
    save_trajectory_csv(r.u, (fs::path(out) / "qlp_solution.csv").string());

    const std::vector<double> scales = c.list("qlp", "threshold_scales");
    if (!scales.empty()) {
        const double fn = bochner_norm(P.f, P.p, StateNorm::grid_l2(P.sg.interior_weights()));
        if (!(fn > 0.0)) throw ValidationError("[qlp] threshold needs a nonzero forcing");
        const Threshold th = small_data_threshold(P.scaled(1.0 / fn), scales, o);
        s["threshold"] = {{"value", jnum(th.value)}, {"cap", th.cap}, {"monotone", th.monotone}};
        std::vector<std::vector<double>> tr;
        for (const auto& row : th.table) tr.push_back({row.scale, row.converged ? 1.0 : 0.0, double(row.iterations)});
        write_csv((fs::path(out) / "threshold.csv").string(), {"scale", "converged", "iterations"}, tr);
    }
}

void cmd_counterexample(const RunConfig& c, Report& rep, const std::string& out) {
    critical::CriticalExample ex;
    ex.d = c.num("counterexample", "d");
    ex.eps = c.num("counterexample", "eps");
    ex.ratio = c.num("counterexample", "ratio");
    ex.nodes = c.count("counterexample", "nodes");
    ex.sub = c.count("counterexample", "sub");
    ex.T = c.num("grid", "T");
    ex.validate();

    const auto I = critical::derivative_norm_truncated(c.list("counterexample", "eps_list"));
    std::vector<std::vector<double>> rows;
    json ij = json::array();
    for (const auto& v : I) {
        rows.push_back({v.eps, v.I, v.closed_form});
        ij.push_back({{"epsilon", v.eps}, {"I", jnum(v.I)}, {"closed_form", jnum(v.closed_form)}});
    }
    write_csv((fs::path(out) / "derivative_norm.csv").string(), {"epsilon", "I", "closed_form"}, rows);
    rep.stage("derivative_norm") = ij;

    const auto sc = critical::sin_increment_bound_check(ex, c.count("counterexample", "sin_samples"),
                                                        std::uint64_t(c.integer("run", "seed")));
    rep.stage("sin_bound") = {{"max_violation", jnum(sc.max_violation)}, {"crossover_error", jnum(sc.crossover_error)}};

    json ib = json::array();
    for (double r : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const auto b = critical::inner_integral_bounds(r);
        ib.push_back({{"r", r}, {"split", jnum(b.split)}, {"term1", jnum(b.term1)}, {"bound1", jnum(b.bound1)},
                      {"term2", jnum(b.term2)}, {"bound2", jnum(b.bound2)}});
    }
    rep.stage("inner_bounds") = ib;

    const auto sweep = critical::critical_frac_sweep(ex, c.list("counterexample", "qs"), c.list("counterexample", "cutoffs"));
    rows.clear();
    json nj = json::array();
    for (const auto& n : sweep) {
        for (std::size_t k = 0; k < n.cutoffs.size(); ++k)
            rows.push_back({n.q, n.values[k], n.cutoffs[k], n.regime1_share, n.regime2_share});
        nj.push_back({{"q", n.q}, {"norm", jnum(n.value)}, {"drift", jnum(n.drift)}, {"flagged", n.flagged},
                      {"bound", jnum(n.bound)}, {"regime1_share", jnum(n.regime1_share)}});
    }
    write_csv((fs::path(out) / "frac_norm_sweep.csv").string(),
              {"q", "norm", "cutoff", "regime1_share", "regime2_share"}, rows);
    rep.stage("critical_frac_norm") = nj;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
    log::init_from_env();
    CLI::App app{"maxreg: non-autonomous maximal regularity laboratory", "maxreg"};
    std::string config_path, out_dir = "maxreg_out";
    int threads = 0;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--threads", threads, "Thread cap (0 = runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "Seed for randomized samples");
    app.require_subcommand(1);
    app.fallthrough();

    auto* s_solve = app.add_subcommand("solve", "Solve u' + A(t) u = f");
    auto* s_diag = app.add_subcommand("diagnose", "Regularity, kernel and maximal-regularity diagnostics");
    auto* s_sweep = app.add_subcommand("sweep", "Critical-regularity refinement sweep");
    auto* s_plan = app.add_subcommand("plan", "Exponent admissibility with exact rationals");
    auto* s_qlp = app.add_subcommand("qlp", "Quasilinear fixed-point solve");
    auto* s_ce = app.add_subcommand("counterexample", "Critical example quantities");
    std::string theta, p, alpha, q;
    s_plan->add_option("--theta", theta, "theta as a/b");
    s_plan->add_option("--p", p, "p as a/b");
    s_plan->add_option("--alpha", alpha, "alpha as a/b");
    s_plan->add_option("--q", q, "q as a/b");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    std::string sub;
    try {
        RunConfig cfg = RunConfig::defaults();
        if (!config_path.empty()) cfg.merge(RunConfig::load(config_path));
        if (seed) cfg.set("run", "seed", std::to_string(*seed));
        if (threads > 0) cfg.set("run", "threads", std::to_string(threads));
        if (!theta.empty()) cfg.set("plan", "theta", theta);
        if (!p.empty()) cfg.set("plan", "p", p);
        if (!alpha.empty()) cfg.set("plan", "alpha", alpha);
        if (!q.empty()) cfg.set("plan", "q", q);
        kernels::set_threads(int(cfg.integer("run", "threads")));

        sub = app.get_subcommands().front()->get_name();
        Report rep(sub, cfg);
        fs::create_directories(out_dir);
        if (s_solve->parsed()) cmd_solve(cfg, rep, out_dir);
        else if (s_diag->parsed()) cmd_diagnose(cfg, rep, out_dir);
        else if (s_sweep->parsed()) cmd_sweep(cfg, rep, out_dir);
        else if (s_plan->parsed()) cmd_plan(cfg, rep);
        else if (s_qlp->parsed()) cmd_qlp(cfg, rep, out_dir);
        else if (s_ce->parsed()) cmd_counterexample(cfg, rep, out_dir);

        if (auto where = rep.first_nan()) {
            rep.write(out_dir);
            std::cerr << "error: NaN in report at " << *where << "\n";
            return 1;
        }
        rep.write(out_dir);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error" << (sub.empty() ? "" : " in " + sub) << ": " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure" << (sub.empty() ? "" : " in " + sub) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure" << (sub.empty() ? "" : " in " + sub) << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace maxreg::cli
