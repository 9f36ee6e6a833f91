#include "maxreg/volterra.hpp"

#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

#include "maxreg/error.hpp"
#include "maxreg/log.hpp"
#include "maxreg/norms.hpp"

namespace maxreg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------- forcing

Forcing::Forcing(TimeGrid g, std::vector<VectorXd> s, std::vector<VectorXd> e)
    : grid(std::move(g)), start(std::move(s)), end(std::move(e)) {
    if (start.size() != grid.m_steps() || end.size() != grid.m_steps())
        throw ValidationError("Forcing: one start and one end value per cell required");
    const auto n = start.front().size();
    for (std::size_t j = 0; j < start.size(); ++j) {
        if (start[j].size() != n || end[j].size() != n) throw ValidationError("Forcing: dimension must be constant");
        if (!start[j].allFinite() || !end[j].allFinite()) throw ValidationError("Forcing: non-finite value in cell " + std::to_string(j));
    }
}

Forcing Forcing::from_trajectory(const Trajectory& f) {
    std::vector<VectorXd> s(f.values.begin(), f.values.end() - 1);
    std::vector<VectorXd> e(f.values.begin() + 1, f.values.end());
    return Forcing(f.grid, std::move(s), std::move(e));
}

Forcing Forcing::zeros(const TimeGrid& g, std::size_t dim) {
    std::vector<VectorXd> z(g.m_steps(), VectorXd::Zero(Eigen::Index(dim)));
    return Forcing(g, z, z);
}

Trajectory Forcing::nodal() const {
    std::vector<VectorXd> v(start.begin(), start.end());
    v.push_back(end.back());
    return Trajectory(grid, std::move(v));
}

Forcing Forcing::scaled(double c) const {
    Forcing out = *this;
    for (auto& v : out.start) v *= c;
    for (auto& v : out.end) v *= c;
    return out;
}

const char* to_string(KernelQuadrature q) {
    switch (q) {
        case KernelQuadrature::exponential_linear: return "exponential_linear";
        case KernelQuadrature::singular_moment: return "singular_moment";
        case KernelQuadrature::left_rectangle: return "left_rectangle";
    }
    return "?";
}

KernelQuadrature kernel_quadrature_from_string(const std::string& s) {
    if (s == "exponential_linear") return KernelQuadrature::exponential_linear;
    if (s == "singular_moment") return KernelQuadrature::singular_moment;
    if (s == "left_rectangle") return KernelQuadrature::left_rectangle;
    throw ValidationError("unknown quadrature '" + s + "' (exponential_linear|singular_moment|left_rectangle)");
}

const char* to_string(Scheme s) { return s == Scheme::backward_euler ? "backward_euler" : "implicit_midpoint"; }

const char* to_string(Route r) {
    switch (r) {
        case Route::integral: return "integral";
        case Route::midpoint: return "midpoint";
        case Route::backward_euler: return "backward_euler";
    }
    return "?";
}

Route route_from_string(const std::string& s) {
    if (s == "integral") return Route::integral;
    if (s == "midpoint") return Route::midpoint;
    if (s == "backward_euler") return Route::backward_euler;
    throw ValidationError("unknown route '" + s + "' (integral|midpoint|backward_euler)");
}

// ---------------------------------------------------------------- weights

namespace {

// (1 - e^{-z}) / z
double phi1m(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
    return -std::expm1(-z) / z;
}

// (e^{-z} - 1 + z) / z^2
double phi2m(double z) {
    if (std::abs(z) < 0.05) {
        // 1/2 - z/6 + z^2/24 - z^3/120 + z^4/720 - z^5/5040 + z^6/40320
        double s = 1.0 / 40320.0;
        s = -z * s + 1.0 / 5040.0;
        s = -z * s + 1.0 / 720.0;
        s = -z * s + 1.0 / 120.0;
        s = -z * s + 1.0 / 24.0;
        s = -z * s + 1.0 / 6.0;
        s = -z * s + 0.5;
        return s;
    }
    return (std::expm1(-z) + z) / (z * z);
}

// int_a^b (t - s)^{e} ds * (t - a)^{-e}, the product weight of a singular factor (t-s)^e
double singular_weight(double t, double a, double b, double e) {
    const double L = t - a, R = t - b;  // L > R >= 0
    double integral;
    if (std::abs(e + 1.0) < 1e-13) integral = std::log(L / R);
    else integral = (std::pow(L, e + 1.0) - std::pow(R, e + 1.0)) / (e + 1.0);
    return integral * std::pow(L, -e);
}

struct RuleInfo {
    KernelQuadrature rule;
    double s1_exp;  // singular exponent for S1 (alpha - 1)
    double s2_exp;  // for S2 (-theta)
    bool fallback;
};

RuleInfo resolve_rule(const VolterraSystem& sys) {
    RuleInfo r{sys.rule, 0.0, -sys.theta, false};
    if (!(sys.theta > 0.0 && sys.theta <= 1.0)) throw ValidationError("VolterraSystem: theta must lie in (0,1]");
    if (sys.rule == KernelQuadrature::singular_moment) {
        if (!sys.fam.certificate()) {
            r.rule = KernelQuadrature::left_rectangle;
            r.fallback = true;
            log::warn("S1 quadrature: no regularity certificate, using left-rectangle weights");
        } else {
            r.s1_exp = sys.fam.certificate()->alpha - 1.0;
        }
    }
    return r;
}

void check_system(const VolterraSystem& sys) {
    if (!sys.f.grid.same_as(sys.fam.time_grid())) throw ValidationError("VolterraSystem: forcing and family must share the time grid");
    if (sys.f.dim() != sys.fam.dim()) throw ValidationError("VolterraSystem: forcing dimension does not match operators");
}

/// Evaluates S1 and S2 contributions at one target node i.
class Engine {
public:
    explicit Engine(const VolterraSystem& sys) : sys_(sys), fam_(sys.fam), tg_(sys.fam.time_grid()), info_(resolve_rule(sys)) {
        check_system(sys);
        const std::size_t m = tg_.m_steps(), n = fam_.dim();
        Fs_.resize(Eigen::Index(n), Eigen::Index(m));
        Fe_.resize(Eigen::Index(n), Eigen::Index(m));
        for (std::size_t j = 0; j < m; ++j) {
            Fs_.col(Eigen::Index(j)) = sys.f.start[j];
            Fe_.col(Eigen::Index(j)) = sys.f.end[j];
        }
    }

    bool fallback() const { return info_.fallback; }

    /// (S2 f)(t_i)
    VectorXd s2(std::size_t i) const {
        const Eigen::Index n = Eigen::Index(fam_.dim());
        if (i == 0) return VectorXd::Zero(n);
        const Eigen::Index ii = Eigen::Index(i);
        if (const Spectral* sp = fam_.spectral(i)) {
            MatrixXd Ws(n, ii), We(n, ii);
            cell_weights(*sp, i, Ws, We, info_.s2_exp);
            const MatrixXd Xs = sp->Vinv * Fs_.leftCols(ii);
            VectorXd r = Ws.cwiseProduct(Xs).rowwise().sum();
            if (info_.rule == KernelQuadrature::exponential_linear) {
                const MatrixXd Xe = sp->Vinv * Fe_.leftCols(ii);
                r += We.cwiseProduct(Xe).rowwise().sum();
            }
            return sp->V * r;
        }
        VectorXd r = VectorXd::Zero(n);
        for (std::size_t j = 0; j < i; ++j) {
            auto [Ms, Me] = matrix_weights(i, j, info_.s2_exp);
            r += Ms * Fs_.col(Eigen::Index(j));
            if (info_.rule == KernelQuadrature::exponential_linear) r += Me * Fe_.col(Eigen::Index(j));
        }
        return r;
    }

    /// (S1 u)(t_i) using nodes j < i. U holds u_j in columns, AU holds A(t_j) u_j.
    VectorXd s1(std::size_t i, const MatrixXd& U, const MatrixXd& AU) const {
        const Eigen::Index n = Eigen::Index(fam_.dim());
        if (i == 0) return VectorXd::Zero(n);
        const Eigen::Index ii = Eigen::Index(i);
        if (const Spectral* sp = fam_.spectral(i)) {
            // eigencoordinates of (A(t_i) - A(t_j)) u_j
            MatrixXd C = sp->lambda.asDiagonal() * (sp->Vinv * U.leftCols(ii)) - sp->Vinv * AU.leftCols(ii);
            MatrixXd Wn(n, ii);
            node_weights(*sp, i, Wn);
            return sp->V * Wn.cwiseProduct(C).rowwise().sum();
        }
        VectorXd r = VectorXd::Zero(n);
        const MatrixXd& Ai = fam_.A(i);
        for (std::size_t j = 0; j < i; ++j) {
            auto [Ms, Me] = matrix_weights(i, j, info_.s1_exp);
            const Eigen::Index jj = Eigen::Index(j);
            r += Ms * (Ai * U.col(jj) - AU.col(jj));
            if (info_.rule == KernelQuadrature::exponential_linear && j + 1 < i)
                r += Me * (Ai * U.col(jj + 1) - AU.col(jj + 1));
        }
        return r;
    }

    /// Upper bound on ||W_ij||_2 of the S1 block (used to size Neumann intervals).
    double s1_block_bound(std::size_t i, std::size_t j) const {
        const double dA = (fam_.A(i) - fam_.A(j)).norm();
        if (dA == 0.0) return 0.0;
        if (const Spectral* sp = fam_.spectral(i)) {
            const double kappa = norm2(sp->V) * norm2(sp->Vinv);
            const Eigen::Index n = Eigen::Index(fam_.dim());
            MatrixXd Wn(n, Eigen::Index(i));
            node_weights(*sp, i, Wn);
            return kappa * Wn.col(Eigen::Index(j)).cwiseAbs().maxCoeff() * dA;
        }
        auto [Ms, Me] = matrix_weights(i, j, info_.s1_exp);
        double w = norm2(Ms);
        if (info_.rule == KernelQuadrature::exponential_linear && j > 0) w += norm2(matrix_weights(i, j - 1, info_.s1_exp).second);
        return w * dA;
    }

private:
    const VolterraSystem& sys_;
    const OperatorFamily& fam_;
    const TimeGrid& tg_;
    RuleInfo info_;
    MatrixXd Fs_, Fe_;

    // per-eigenvalue weights on cell start / end values for target i
    void cell_weights(const Spectral& sp, std::size_t i, MatrixXd& Ws, MatrixXd& We, double sing_exp) const {
        const double ti = tg_.t(i);
        const Eigen::Index n = sp.lambda.size();
        for (std::size_t j = 0; j < i; ++j) {
            const double a = tg_.t(j), b = tg_.t(j + 1), h = b - a;
            const Eigen::Index jj = Eigen::Index(j);
            for (Eigen::Index k = 0; k < n; ++k) {
                const double l = sp.lambda(k);
                switch (info_.rule) {
                    case KernelQuadrature::exponential_linear: {
                        const double z = h * l, decay = std::exp(-(ti - b) * l);
                        const double p1 = phi1m(z), p2 = phi2m(z);
                        Ws(k, jj) = h * decay * (p1 - p2);
                        We(k, jj) = h * decay * p2;
                        break;
                    }
                    case KernelQuadrature::singular_moment:
                        Ws(k, jj) = std::exp(-(ti - a) * l) * singular_weight(ti, a, b, sing_exp);
                        We(k, jj) = 0.0;
                        break;
                    case KernelQuadrature::left_rectangle:
                        Ws(k, jj) = std::exp(-(ti - a) * l) * h;
                        We(k, jj) = 0.0;
                        break;
                }
            }
        }
    }

    // S1 data lives on nodes; fold cell start/end weights onto nodes 0..i-1 (node i carries zero data)
    void node_weights(const Spectral& sp, std::size_t i, MatrixXd& Wn) const {
        const Eigen::Index n = sp.lambda.size(), ii = Eigen::Index(i);
        MatrixXd Ws(n, ii), We(n, ii);
        cell_weights(sp, i, Ws, We, info_.s1_exp);
        Wn = Ws;
        if (info_.rule == KernelQuadrature::exponential_linear && ii > 1) Wn.rightCols(ii - 1) += We.leftCols(ii - 1);
    }

    // matrix weights for cell j and target i, fallback path without a diagonalization
    std::pair<MatrixXd, MatrixXd> matrix_weights(std::size_t i, std::size_t j, double sing_exp) const {
        const MatrixXd& Ai = fam_.A(i);
        const Eigen::Index n = Ai.rows();
        const double ti = tg_.t(i), a = tg_.t(j), b = tg_.t(j + 1), h = b - a;
        if (info_.rule != KernelQuadrature::exponential_linear) {
            const double w = info_.rule == KernelQuadrature::singular_moment ? singular_weight(ti, a, b, sing_exp) : h;
            return {MatrixXd((-(ti - a) * Ai).exp()) * w, MatrixXd::Zero(n, n)};
        }
        // [[Z, I, 0], [0, 0, I], [0, 0, 0]] exponentiates to [e^Z, phi1(Z), phi2(Z)] in the first block row
        MatrixXd aug = MatrixXd::Zero(3 * n, 3 * n);
        aug.topLeftCorner(n, n) = -h * Ai;
        aug.block(0, n, n, n).setIdentity();
        aug.block(n, 2 * n, n, n).setIdentity();
        const MatrixXd E = aug.exp();
        const MatrixXd P1 = E.block(0, n, n, n), P2 = E.block(0, 2 * n, n, n);
        const MatrixXd decay = (-(ti - b) * Ai).exp();
        return {h * decay * (P1 - P2), h * decay * P2};
    }
};

void check_finite(const VectorXd& v, std::size_t i, const char* stage) {
    if (!v.allFinite())
        throw NumericalError(std::string(stage) + ": non-finite value at time index " + std::to_string(i));
}

double l2_time(const TimeGrid& tg, const std::vector<VectorXd>& v) {
    return bochner_norm(Trajectory(tg, v), 2.0);
}

}  // namespace

// ---------------------------------------------------------------- S1, S2

Trajectory apply_S1(const VolterraSystem& sys, const Trajectory& u, bool* flagged) {
    if (!u.grid.same_as(sys.fam.time_grid())) throw ValidationError("apply_S1: trajectory not on the system grid");
    if (u.dim() != sys.fam.dim()) throw ValidationError("apply_S1: dimension mismatch");
    Engine eng(sys);
    if (flagged) *flagged = eng.fallback();
    const std::size_t N = u.size();
    const Eigen::Index n = Eigen::Index(u.dim());
    MatrixXd U(n, Eigen::Index(N)), AU(n, Eigen::Index(N));
    for (std::size_t j = 0; j < N; ++j) {
        U.col(Eigen::Index(j)) = u[j];
        AU.col(Eigen::Index(j)) = sys.fam.A(j) * u[j];
    }
    std::vector<VectorXd> out(N);
    const long NN = long(N);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < NN; ++i) out[std::size_t(i)] = eng.s1(std::size_t(i), U, AU);
    return Trajectory(u.grid, std::move(out));
}

Trajectory apply_S2(const VolterraSystem& sys, bool* flagged) {
    Engine eng(sys);
    if (flagged) *flagged = eng.fallback();
    const std::size_t N = sys.fam.size();
    std::vector<VectorXd> out(N);
    const long NN = long(N);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < NN; ++i) out[std::size_t(i)] = eng.s2(std::size_t(i));
    return Trajectory(sys.fam.time_grid(), std::move(out));
}

IntegralSolve solve_integral_equation(const VolterraSystem& sys, const IntegralSolveOptions& opt) {
    Engine eng(sys);
    const auto& fam = sys.fam;
    const std::size_t N = fam.size();
    const Eigen::Index n = Eigen::Index(fam.dim());

    std::vector<VectorXd> b(N);
    const long NN = long(N);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < NN; ++i) b[std::size_t(i)] = eng.s2(std::size_t(i));
    for (std::size_t i = 0; i < N; ++i) check_finite(b[i], i, "S2 f");

    MatrixXd U = MatrixXd::Zero(n, Eigen::Index(N)), AU = MatrixXd::Zero(n, Eigen::Index(N));
    IntegralSolve res{Trajectory::zeros(fam.time_grid(), fam.dim())};
    res.rule_fallback = eng.fallback();

    auto store = [&](std::size_t i, const VectorXd& v) {
        U.col(Eigen::Index(i)) = v;
        AU.col(Eigen::Index(i)) = fam.A(i) * v;
    };

    if (!opt.neumann) {
        // causal forward substitution: exact inversion of the discrete Id - S1
        for (std::size_t i = 1; i < N; ++i) {
            VectorXd ui = eng.s1(i, U, AU) + b[i];
            check_finite(ui, i, "integral equation");
            store(i, ui);
        }
    } else {
        std::size_t i0 = 1;
        while (i0 < N) {
            // grow the interval while the block-norm bound of S1 restricted to it stays below 1/2
            std::size_t i1 = i0;
            while (i1 + 1 < N) {
                const std::size_t cand = i1 + 1;
                double row = 0.0;
                for (std::size_t j = i0; j < cand; ++j) row += eng.s1_block_bound(cand, j);
                if (row >= 0.5) break;
                i1 = cand;
            }
            ++res.neumann_intervals;
            for (std::size_t i = i0; i <= i1; ++i) store(i, VectorXd::Zero(n));
            for (std::size_t sweep = 0;; ++sweep) {
                if (sweep >= opt.neumann_max_sweeps)
                    throw NumericalError("integral equation: Neumann iteration did not converge on interval starting at time index " + std::to_string(i0));
                std::vector<VectorXd> next(i1 - i0 + 1);
                const long cnt = long(next.size());
#pragma omp parallel for schedule(dynamic)
                for (long k = 0; k < cnt; ++k) {
                    const std::size_t i = i0 + std::size_t(k);
                    next[std::size_t(k)] = eng.s1(i, U, AU) + b[i];
                }
                double change = 0.0, scale = 0.0;
                for (std::size_t k = 0; k < next.size(); ++k) {
                    check_finite(next[k], i0 + k, "Neumann iteration");
                    change = std::max(change, (next[k] - U.col(Eigen::Index(i0 + k))).cwiseAbs().maxCoeff());
                    scale = std::max(scale, next[k].cwiseAbs().maxCoeff());
                    store(i0 + k, next[k]);
                }
                ++res.neumann_sweeps;
                if (change <= opt.neumann_tol * std::max(scale, 1e-300)) break;
            }
            i0 = i1 + 1;
        }
    }

    for (std::size_t i = 0; i < N; ++i) res.u[i] = U.col(Eigen::Index(i));

    if (opt.verify_residual) {
        std::vector<VectorXd> r(N);
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < NN; ++i) {
            const std::size_t ii = std::size_t(i);
            r[ii] = res.u[ii] - eng.s1(ii, U, AU) - b[ii];
        }
        const double num = l2_time(fam.time_grid(), r);
        const double den = l2_time(fam.time_grid(), b);
        res.residual_rel = den > 0.0 ? num / den : num;
        const double tol = opt.neumann ? std::max(1e-10, 10.0 * opt.neumann_tol) : 1e-10;
        if (!(res.residual_rel <= tol))
            throw NumericalError("integral equation: residual " + std::to_string(res.residual_rel) + " exceeds tolerance");
    }
    return res;
}

// ---------------------------------------------------------------- time stepping

VectorXd solve_tridiagonal(const MatrixXd& M, const VectorXd& b) {
    const Eigen::Index n = M.rows();
    std::vector<double> c(std::size_t(n), 0.0), d(std::size_t(n), 0.0);
    double beta = M(0, 0);
    if (beta == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    d[0] = b(0) / beta;
    for (Eigen::Index i = 1; i < n; ++i) {
        c[std::size_t(i - 1)] = M(i - 1, i) / beta;
        beta = M(i, i) - M(i, i - 1) * c[std::size_t(i - 1)];
        if (beta == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
        d[std::size_t(i)] = (b(i) - M(i, i - 1) * d[std::size_t(i - 1)]) / beta;
    }
    VectorXd x(n);
    x(n - 1) = d[std::size_t(n - 1)];
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d[std::size_t(i)] - c[std::size_t(i)] * x(i + 1);
    return x;
}

OperatorSource source_of(const OperatorFamily& fam) {
    return {fam.time_grid(), fam.dim(), fam.tridiagonal(), [&fam](std::size_t i) { return fam.A(i); }, fam.space_grid()};
}

Trajectory solve_timestepper(const OperatorFamily& fam, const Forcing& f, const VectorXd& u0, Scheme scheme) {
    return solve_timestepper(source_of(fam), f, u0, scheme);
}

Trajectory solve_timestepper(const OperatorSource& src, const Forcing& f, const VectorXd& u0, Scheme scheme) {
    if (!f.grid.same_as(src.grid)) throw ValidationError("solve_timestepper: forcing and family must share the time grid");
    if (f.dim() != src.dim || std::size_t(u0.size()) != src.dim) throw ValidationError("solve_timestepper: dimension mismatch");
    if (!u0.allFinite()) throw ValidationError("solve_timestepper: non-finite initial value");
    const auto& tg = src.grid;
    const Eigen::Index n = u0.size();
    const MatrixXd I = MatrixXd::Identity(n, n);
    std::vector<VectorXd> u(tg.n_nodes());
    u[0] = u0;
    MatrixXd Acur = src.at(0);
    for (std::size_t k = 0; k < tg.m_steps(); ++k) {
        const double dt = tg.step(k);
        MatrixXd Anext = src.at(k + 1);
        MatrixXd M;
        VectorXd rhs;
        if (scheme == Scheme::implicit_midpoint) {
            const MatrixXd Am = 0.5 * (Acur + Anext);
            M = I + 0.5 * dt * Am;
            rhs = u[k] - 0.5 * dt * (Am * u[k]) + dt * 0.5 * (f.start[k] + f.end[k]);
        } else {
            M = I + dt * Anext;
            rhs = u[k] + dt * f.end[k];
        }
        VectorXd next;
        if (src.tridiagonal) {
            next = solve_tridiagonal(M, rhs);
        } else {
            Eigen::PartialPivLU<MatrixXd> lu(M);
            if (!(std::abs(lu.determinant()) > 0.0)) throw NumericalError("time stepper: singular step matrix at step " + std::to_string(k));
            next = lu.solve(rhs);
        }
        check_finite(next, k + 1, "time stepper");
        u[k + 1] = std::move(next);
        Acur = std::move(Anext);
    }
    return Trajectory(tg, std::move(u));
}

// ---------------------------------------------------------------- initial values

Extension extend_initial_value(const OperatorFamily& fam, const Forcing& f, const VectorXd& u0, double p) {
    if (std::size_t(u0.size()) != fam.dim()) throw ValidationError("extend_initial_value: dimension mismatch");
    const double tr = trace_norm(fam.A(0), u0, p);
    if (!std::isfinite(tr)) throw ValidationError("extend_initial_value: initial value has no finite trace norm");

    const auto& tg = fam.time_grid();
    const std::size_t m = tg.m_steps();
    const double T = tg.T();
    std::vector<double> nodes;
    nodes.reserve(3 * m + 1);
    for (int piece = 0; piece < 3; ++piece)
        for (std::size_t i = (piece == 0 ? 0 : 1); i <= m; ++i) nodes.push_back(piece * T + tg.t(i));
    TimeGrid g3 = TimeGrid::from_nodes(nodes);

    std::vector<MatrixXd> ops;
    ops.reserve(3 * m + 1);
    for (std::size_t i = 0; i <= m; ++i) ops.push_back(fam.A(0));
    for (std::size_t i = 1; i <= m; ++i) ops.push_back(fam.A(i));
    for (std::size_t i = 1; i <= m; ++i) ops.push_back(fam.A(m));
    OperatorFamily B(g3, std::move(ops), fam.space_grid());
    if (fam.certificate()) B.set_certificate(*fam.certificate());

    // lift v(t) = (t/T) e^{-(T-t)A0} u0, g = v' + A0 v = (1/T + 2 (t/T) A0) e^{-(T-t)A0} u0
    const MatrixXd& A0 = fam.A(0);
    auto lift_g = [&](double t) -> VectorXd {
        const VectorXd e = semigroup(A0, T - t) * u0;
        return e / T + 2.0 * (t / T) * (A0 * e);
    };
    std::vector<VectorXd> gs, ge;
    gs.reserve(3 * m);
    ge.reserve(3 * m);
    for (std::size_t j = 0; j < m; ++j) {
        gs.push_back(lift_g(tg.t(j)));
        ge.push_back(lift_g(tg.t(j + 1)));
    }
    for (std::size_t j = 0; j < m; ++j) {
        gs.push_back(f.start[j]);
        ge.push_back(f.end[j]);
    }
    for (std::size_t j = 0; j < m; ++j) {
        gs.push_back(VectorXd::Zero(u0.size()));
        ge.push_back(VectorXd::Zero(u0.size()));
    }
    return Extension{std::move(B), Forcing(g3, std::move(gs), std::move(ge)), m, tr};
}

Trajectory restrict_middle(const Extension& ext, const Trajectory& w, const TimeGrid& original) {
    if (w.size() != 3 * ext.m + 1) throw ValidationError("restrict_middle: trajectory not on the extended grid");
    std::vector<VectorXd> v(w.values.begin() + long(ext.m), w.values.begin() + long(2 * ext.m) + 1);
    return Trajectory(original, std::move(v));
}

Trajectory solve(const OperatorFamily& fam, const Forcing& f, const VectorXd& u0, Route route, double theta, double p,
                 KernelQuadrature rule) {
    switch (route) {
        case Route::midpoint: return solve_timestepper(fam, f, u0, Scheme::implicit_midpoint);
        case Route::backward_euler: return solve_timestepper(fam, f, u0, Scheme::backward_euler);
        case Route::integral: break;
    }
    if (u0.isZero(0.0)) {
        VolterraSystem sys{fam, f, theta, rule};
        return solve_integral_equation(sys).u;
    }
    Extension ext = extend_initial_value(fam, f, u0, p);
    VolterraSystem sys{ext.B, ext.g, theta, rule};
    Trajectory w = solve_integral_equation(sys).u;
    return restrict_middle(ext, w, fam.time_grid());
}

}  // namespace maxreg
