#include "maxreg/norms.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "maxreg/error.hpp"
#include "maxreg/operator_calculus.hpp"

namespace maxreg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double StateNorm::operator()(const VectorXd& v) const {
    switch (kind) {
        case StateNormKind::euclidean: return v.norm();
        case StateNormKind::sup: return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
        case StateNormKind::grid_l2: {
            if (weights.size() != std::size_t(v.size())) throw ValidationError("grid_l2 norm: weight count does not match state dimension");
            double s = 0.0;
            for (Eigen::Index j = 0; j < v.size(); ++j) s += weights[std::size_t(j)] * v(j) * v(j);
            return std::sqrt(s);
        }
    }
    return 0.0;
}

std::string StateNorm::label() const {
    switch (kind) {
        case StateNormKind::euclidean: return "euclidean";
        case StateNormKind::sup: return "sup";
        case StateNormKind::grid_l2: return "grid_l2";
    }
    return "?";
}

double bochner_norm(const Trajectory& u, double p, const StateNorm& norm) {
    if (!(p >= 1.0)) throw ValidationError("bochner_norm: p must be >= 1");
    const auto& tg = u.grid;
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : u.values) m = std::max(m, norm(v));
        return m;
    }
    std::vector<double> g(u.size() - 1);
    double prev = std::pow(norm(u[0]), p);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double next = std::pow(norm(u[i + 1]), p);
        g[i] = 0.5 * tg.step(i) * (prev + next);
        prev = next;
    }
    return std::pow(kernels::pairwise_sum(g), 1.0 / p);
}

IncrementFn trajectory_increments(const Trajectory& u, const StateNorm& norm) {
    return [&u, norm](std::size_t i, std::size_t j) { return norm(u[i] - u[j]); };
}

IncrementFn operator_increments(const std::vector<MatrixXd>& F, MatrixXd L, MatrixXd R) {
    return [&F, L = std::move(L), R = std::move(R)](std::size_t i, std::size_t j) {
        MatrixXd D = F[i] - F[j];
        if (L.size()) D = L * D;
        if (R.size()) D = D * R;
        return norm2(D);
    };
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// int_a^b r^beta dr
double power_moment(double a, double b, double beta) {
    if (std::abs(beta + 1.0) < 1e-13) return std::log(b / a);
    return (std::pow(b, beta + 1.0) - std::pow(a, beta + 1.0)) / (beta + 1.0);
}

}  // namespace

HolderFit holder_modulus(const TimeGrid& tg, const IncrementFn& inc, bool parallel) {
    const std::size_t m = tg.m_steps();
    if (tg.n_nodes() < 3) throw ValidationError("holder_modulus: need at least 3 time samples");
    if (!tg.uniform()) throw ValidationError("holder_modulus: uniform time grid required for dyadic lags");
    std::vector<double> lx, ly;
    bool any = false;
    for (std::size_t L = 1; L <= m; L *= 2) {
        double sup = 0.0;
        for (std::size_t j = 0; j + L <= m; ++j) sup = std::max(sup, inc(j + L, j));
        if (sup > 0.0) {
            any = true;
            lx.push_back(std::log(tg.t(L)));
            ly.push_back(std::log(sup));
        }
    }
    if (!any) return {1.0, 0.0};
    // finest half of the lags: the coarse ones see the range of F, not its modulus of continuity
    const std::size_t keep = std::max<std::size_t>(2, (lx.size() + 1) / 2);
    if (lx.size() > keep) {
        lx.resize(keep);
        ly.resize(keep);
    }
    double alpha = lx.size() >= 2 ? ls_slope(lx, ly) : 1.0;
    alpha = std::clamp(alpha, 1e-6, 1.0);
    const auto t = tg.nodes();
    const double C = parallel ? kernels::omp::holder_constant(t, inc, alpha)
                              : kernels::serial::holder_constant(t, inc, alpha);
    return {alpha, C};
}

HolderFit holder_modulus(const Trajectory& u, const StateNorm& norm) {
    return holder_modulus(u.grid, trajectory_increments(u, norm));
}

FracNorm frac_sobolev_norm(const TimeGrid& tg, const IncrementFn& inc, double alpha, double p, bool parallel) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("frac_sobolev_norm: alpha must lie in (0,1)");
    if (!(p > 1.0) || std::isinf(p)) throw ValidationError("frac_sobolev_norm: p must lie in (1, inf)");
    if (!tg.uniform()) throw ValidationError("frac_sobolev_norm: uniform time grid required");
    const std::size_t m = tg.m_steps();
    if (m < 4) throw ValidationError("frac_sobolev_norm: need at least 4 time steps");
    const double T = tg.T();
    const double h = T / double(m);

    const std::vector<double> D = parallel ? kernels::omp::lag_sums(m, h, inc, p)
                                           : kernels::serial::lag_sums(m, h, inc, p);
    FracNorm out;
    if (std::all_of(D.begin(), D.end(), [](double d) { return d == 0.0; })) return out;

    const double gamma = 1.0 + alpha * p;
    double mu;
    if (D[1] > 0.0 && D[2] > 0.0) {
        mu = std::log2((D[2] / (T - 2 * h)) / (D[1] / (T - h)));
    } else if (D[1] == 0.0) {
        mu = p;  // no band contribution; treat as Lipschitz for the lag weights
    } else {
        out.value = kInfinity;
        out.alpha_loc = 0.0;
        out.unreliable = true;
        return out;
    }
    out.alpha_loc = mu / p;
    const double beta = mu - gamma;

    // band [0, h]: D(r) ~ C^p r^mu (T - r)
    double band = 0.0;
    if (D[1] > 0.0) {
        if (!(beta > -1.0)) {
            out.value = kInfinity;
            out.unreliable = true;
            out.band_share = 1.0;
            return out;
        }
        const double Cp = D[1] / ((T - h) * std::pow(h, mu));
        band = Cp * (T * power_moment(0.0, h, beta) - power_moment(0.0, h, beta + 1.0));
    }

    // off-band: D(r) = E(r) r^mu with E piecewise linear through E_k = D_k / r_k^mu
    std::vector<double> pieces(m - 1);
    auto E = [&](std::size_t k) { return D[k] / std::pow(double(k) * h, mu); };
    for (std::size_t k = 1; k < m; ++k) {
        const double a = double(k) * h, b = double(k + 1) * h;
        const double Ea = E(k), Eb = E(k + 1);
        const double slope = (Eb - Ea) / h;
        // int_a^b (Ea + slope (r - a)) r^beta dr
        pieces[k - 1] = (Ea - slope * a) * power_moment(a, b, beta) + slope * power_moment(a, b, beta + 1.0);
    }
    const double off = kernels::pairwise_sum(pieces);
    const double total = 2.0 * (band + off);
    out.band_share = total > 0.0 ? 2.0 * band / total : 0.0;
    out.unreliable = out.band_share > 0.2;
    out.value = std::pow(std::max(total, 0.0), 1.0 / p);
    return out;
}

FracNorm frac_sobolev_norm(const Trajectory& u, double alpha, double p, const StateNorm& norm) {
    return frac_sobolev_norm(u.grid, trajectory_increments(u, norm), alpha, p);
}

double frac_sobolev_full(const Trajectory& u, double alpha, double p, const StateNorm& norm) {
    return bochner_norm(u, p, norm) + frac_sobolev_norm(u, alpha, p, norm).value;
}

double trace_norm(const MatrixXd& A0, const VectorXd& u0, double p, const StateNorm& norm) {
    if (!(p > 1.0) || std::isinf(p)) throw ValidationError("trace_norm: p must lie in (1, inf)");
    if (A0.rows() != A0.cols() || A0.rows() != u0.size()) throw ValidationError("trace_norm: dimension mismatch");
    auto s = Spectral::try_decompose(A0);
    if (!s || !(s->lambda.minCoeff() > 0.0))
        throw ValidationError("trace_norm: A0 must be positive definite (real positive spectrum)");
    if (u0.isZero(0.0)) return 0.0;
    const VectorXd c = s->Vinv * u0;
    const VectorXd& lam = s->lambda;
    const bool orth = norm.kind == StateNormKind::euclidean &&
                      (s->V.transpose() * s->V - MatrixXd::Identity(lam.size(), lam.size())).cwiseAbs().maxCoeff() < 1e-10;

    auto integrand = [&](double t) {
        VectorXd w = (lam.array() * (-t * lam.array()).exp() * c.array()).matrix();
        const double nrm = orth ? w.norm() : norm(s->V * w);
        return std::pow(nrm, p);
    };
    using GL = boost::math::quadrature::gauss<double, 20>;
    const double lmax = lam.maxCoeff(), lmin = lam.minCoeff();
    const double s0 = std::min(1e-6, 1e-3 / lmax);
    double sum = GL::integrate(integrand, 0.0, s0);
    double peak = 0.0;
    const double ratio = std::sqrt(2.0);
    for (double a = s0;; a *= ratio) {
        const double b = a * ratio;
        sum += GL::integrate(integrand, a, b);
        const double fb = integrand(b);
        peak = std::max({peak, integrand(a), fb});
        if (b * lmin > 1.0 && fb < 1e-14 * peak) break;
        if (b > 1e300) throw NumericalError("trace_norm: quadrature did not terminate");
    }
    return norm(u0) + std::pow(sum, 1.0 / p);
}

RegularityReport regularity_report(const Trajectory& u, double alpha, double p, const StateNorm& norm,
                                   const MatrixXd* A0) {
    RegularityReport r;
    r.holder = holder_modulus(u, norm);
    r.frac = frac_sobolev_norm(u, alpha, p, norm);
    r.frac_full = bochner_norm(u, p, norm) + r.frac.value;
    if (A0) r.trace = trace_norm(*A0, u[0], p);
    r.alpha = alpha;
    r.p = p;
    r.norm_label = norm.label();
    r.time_nodes = u.size();
    return r;
}

}  // namespace maxreg
