#include "maxreg/operator_calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "maxreg/error.hpp"

namespace maxreg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kMaxCond = 1e8;

bool is_symmetric(const MatrixXd& A) {
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    return (A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

// Tridiagonal with positive off-diagonal products is diagonally similar to a symmetric matrix.
// Returns the scaling d with diag(d) A diag(d)^{-1} symmetric.
std::optional<VectorXd> symmetrizer(const MatrixXd& A) {
    const Eigen::Index n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(i - j) > 1 && A(i, j) != 0.0) return std::nullopt;
    VectorXd d(n);
    d(0) = 1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double lo = A(i + 1, i), up = A(i, i + 1);
        if (lo == 0.0 && up == 0.0) {
            d(i + 1) = 1.0;
            continue;
        }
        if (!(lo * up > 0.0)) return std::nullopt;
        d(i + 1) = d(i) * std::sqrt(lo / up);
    }
    if (!d.allFinite() || d.maxCoeff() / d.minCoeff() > kMaxCond) return std::nullopt;
    return d;
}

void reject_nan(const MatrixXd& A, const char* who) {
    if (!A.allFinite()) throw ValidationError(std::string(who) + ": matrix has non-finite entries");
}

}  // namespace

std::optional<Spectral> Spectral::try_decompose(const MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() == 0) return std::nullopt;
    Spectral s;
    if (is_symmetric(A)) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()));
        if (es.info() != Eigen::Success) return std::nullopt;
        s.lambda = es.eigenvalues();
        s.V = es.eigenvectors();
        s.Vinv = s.V.transpose();
        return s;
    }
    if (auto d = symmetrizer(A)) {
        const MatrixXd B = d->asDiagonal() * A * d->cwiseInverse().asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (B + B.transpose()));
        if (es.info() != Eigen::Success) return std::nullopt;
        s.lambda = es.eigenvalues();
        s.V = d->cwiseInverse().asDiagonal() * es.eigenvectors();
        s.Vinv = es.eigenvectors().transpose() * d->asDiagonal();
        return s;
    }
    Eigen::EigenSolver<MatrixXd> es(A);
    if (es.info() != Eigen::Success) return std::nullopt;
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-12 * scale) return std::nullopt;
    Eigen::MatrixXcd Vc = es.eigenvectors();
    if (Vc.imag().cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
    s.lambda = es.eigenvalues().real();
    s.V = Vc.real();
    Eigen::JacobiSVD<MatrixXd> svd(s.V);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > kMaxCond) return std::nullopt;
    s.Vinv = s.V.inverse();
    return s;
}

double norm2(const MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    if (M.rows() == 1 || M.cols() == 1) return M.norm();
    if (M.rows() == M.cols() && (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * M.cwiseAbs().maxCoeff()) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::BDCSVD<MatrixXd> svd(M);
    return svd.singularValues()(0);
}

MatrixXd semigroup(const MatrixXd& A, double tau) {
    if (std::isnan(tau) || tau < 0.0) throw ValidationError("semigroup: tau must be >= 0");
    reject_nan(A, "semigroup");
    if (tau == 0.0) return MatrixXd::Identity(A.rows(), A.cols());
    if (auto s = Spectral::try_decompose(A)) return s->apply([tau](double l) { return std::exp(-tau * l); });
    return MatrixXd((-tau * A).exp());
}

MatrixXd semigroup(const DiscreteOperator& A, double tau) { return semigroup(A.A, tau); }

namespace {

void check_power_spectrum(const Eigen::VectorXcd& ev, double scale) {
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= 1e-14 * scale) throw ValidationError("frac_power: matrix is singular");
        if (std::abs(ev(i).imag()) <= 1e-14 * scale && ev(i).real() <= 0.0)
            throw ValidationError("frac_power: spectrum touches (-inf, 0]");
    }
}

}  // namespace

MatrixXd frac_power(const MatrixXd& A, double theta) {
    if (!(theta >= -1.0 && theta <= 1.0)) throw ValidationError("frac_power: theta must lie in [-1,1]");
    reject_nan(A, "frac_power");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if (auto s = Spectral::try_decompose(A)) {
        check_power_spectrum(s->lambda.cast<cplx>(), scale);
        if (theta == 0.0) return MatrixXd::Identity(A.rows(), A.cols());
        if (theta == 1.0) return A;
        return s->apply([theta](double l) { return std::pow(l, theta); });
    }
    check_power_spectrum(Eigen::EigenSolver<MatrixXd>(A, false).eigenvalues(), scale);
    if (theta == 0.0) return MatrixXd::Identity(A.rows(), A.cols());
    if (theta == 1.0) return A;
    Eigen::MatrixPower<MatrixXd> P(A);
    return P(theta);
}

MatrixXd frac_power(const DiscreteOperator& A, double theta) { return frac_power(A.A, theta); }

double theta_norm(const MatrixXd& A, double theta, const VectorXd& x) {
    if (x.size() != A.rows()) throw ValidationError("theta_norm: dimension mismatch");
    return (frac_power(A, theta) * x).norm();
}

double theta_norm(const DiscreteOperator& A, double theta, const VectorXd& x) {
    return theta_norm(A.A, theta, x);
}

// ---------------------------------------------------------------- sectoriality

SectorReport sectoriality_report(const Eigen::MatrixXcd& A, double phi, int samples) {
    if (!(phi > 0.0 && phi < std::numbers::pi)) throw ValidationError("sectoriality_report: phi must lie in (0, pi)");
    if (samples < 2) throw ValidationError("sectoriality_report: need at least 2 samples per ray");
    if (!A.allFinite()) throw ValidationError("sectoriality_report: matrix has non-finite entries");
    const Eigen::Index n = A.rows();

    SectorReport rep{phi, 0.0, true, 0.0,
                     "resolvent bound sampled on the sector boundary; in finite dimension the "
                     "R-bound coincides with this uniform bound"};

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx mu = es.eigenvalues()(i);
        if (std::abs(mu) <= 1e-14 * scale) continue;  // 0 lies in the closed sector
        if (std::abs(std::arg(mu)) > phi) rep.eigenvalues_in_sector = false;
    }

    const cplx rays[3] = {std::polar(1.0, phi), std::polar(1.0, -phi), cplx(-1.0, 0.0)};
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 0; k < samples; ++k) {
        const double rho = std::pow(10.0, -3.0 + 9.0 * k / double(samples - 1));
        for (const cplx& dir : rays) {
            const cplx lam = rho * dir;
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(lam * I - A);
            const double smin = svd.singularValues()(n - 1);
            if (!(smin > 0.0) || !std::isfinite(smin)) {
                rep.bound = std::numeric_limits<double>::infinity();
                rep.eigenvalues_in_sector = false;
                continue;
            }
            rep.bound = std::max(rep.bound, (rho + 1.0) / smin);
        }
    }
    rep.r_bound = rep.bound;
    return rep;
}

SectorReport sectoriality_report(const DiscreteOperator& A, double phi, int samples) {
    return sectoriality_report(Eigen::MatrixXcd(A.A.cast<cplx>()), phi, samples);
}

// ---------------------------------------------------------------- families

OperatorFamily::OperatorFamily(TimeGrid tg, std::vector<MatrixXd> ops, std::optional<SpaceGrid> grid)
    : tg_(std::move(tg)), ops_(std::move(ops)), grid_(std::move(grid)) {
    if (ops_.size() != tg_.n_nodes()) throw ValidationError("OperatorFamily: one operator per time node required");
    const Eigen::Index n = ops_.front().rows();
    if (n == 0) throw ValidationError("OperatorFamily: empty operator");
    for (const auto& A : ops_) {
        if (A.rows() != n || A.cols() != n) throw ValidationError("OperatorFamily: operators must share one square dimension");
        reject_nan(A, "OperatorFamily");
    }
    if (grid_ && grid_->n_interior() != std::size_t(n)) throw ValidationError("OperatorFamily: grid does not match operator order");
    tridiagonal_ = true;
    for (const auto& A : ops_) {
        for (Eigen::Index i = 0; i < n && tridiagonal_; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (std::abs(i - j) > 1 && A(i, j) != 0.0) { tridiagonal_ = false; break; }
        if (!tridiagonal_) break;
    }
    run_start_.resize(ops_.size());
    for (std::size_t i = 0; i < ops_.size(); ++i)
        run_start_[i] = (i > 0 && ops_[i] == ops_[i - 1]) ? run_start_[i - 1] : i;
    cache_ = std::make_shared<Cache>(ops_.size());
}

OperatorFamily OperatorFamily::from_field(const CoefficientField& field, double shift, MidpointRule rule) {
    const auto& sg = field.space_grid();
    std::vector<MatrixXd> ops;
    ops.reserve(field.time_grid().n_nodes());
    for (std::size_t i = 0; i < field.time_grid().n_nodes(); ++i)
        ops.push_back(assemble_operator(field, i, sg, shift, rule).A);
    return OperatorFamily(field.time_grid(), std::move(ops), sg);
}

OperatorFamily OperatorFamily::from_function(const TimeGrid& tg, const std::function<MatrixXd(double)>& A,
                                             std::optional<SpaceGrid> grid) {
    std::vector<MatrixXd> ops;
    ops.reserve(tg.n_nodes());
    for (std::size_t i = 0; i < tg.n_nodes(); ++i) ops.push_back(A(tg.t(i)));
    return OperatorFamily(tg, std::move(ops), std::move(grid));
}

const Spectral* OperatorFamily::spectral(std::size_t i) const {
    auto& c = *cache_;
    std::call_once(c.once[i], [&] {
        // reuse the decomposition of an identical earlier operator (piecewise constant families)
        const std::size_t j = run_start_[i];
        if (j < i) {
            const Spectral* first = spectral(j);
            if (first) c.spec[i] = *first;
            return;
        }
        c.spec[i] = Spectral::try_decompose(ops_[i]);
    });
    return c.spec[i] ? &*c.spec[i] : nullptr;
}

bool OperatorFamily::autonomous() const {
    return run_start_.back() == 0;
}

MatrixXd family_semigroup(const OperatorFamily& fam, std::size_t i, double tau) {
    if (std::isnan(tau) || tau < 0.0) throw ValidationError("semigroup: tau must be >= 0");
    if (tau == 0.0) return MatrixXd::Identity(fam.dim(), fam.dim());
    if (const Spectral* s = fam.spectral(i)) return s->apply([tau](double l) { return std::exp(-tau * l); });
    return MatrixXd((-tau * fam.A(i)).exp());
}

MatrixXd family_power(const OperatorFamily& fam, std::size_t i, double theta) {
    if (const Spectral* s = fam.spectral(i)) {
        if (!(theta >= -1.0 && theta <= 1.0)) throw ValidationError("frac_power: theta must lie in [-1,1]");
        const double scale = std::max(1.0, s->lambda.cwiseAbs().maxCoeff());
        check_power_spectrum(s->lambda.cast<cplx>(), scale);
        if (theta == 0.0) return MatrixXd::Identity(fam.dim(), fam.dim());
        return s->apply([theta](double l) { return std::pow(l, theta); });
    }
    return frac_power(fam.A(i), theta);
}

double theta_stability_constant(OperatorFamily& fam, double theta) {
    const MatrixXd P0 = family_power(fam, 0, theta);
    const MatrixXd M0 = family_power(fam, 0, -theta);
    double K = 1.0;
    for (std::size_t i = 1; i < fam.size(); ++i) {
        if (fam.A(i) == fam.A(0)) continue;
        K = std::max(K, norm2(family_power(fam, i, theta) * M0));
        K = std::max(K, norm2(P0 * family_power(fam, i, -theta)));
    }
    fam.set_stability_constant(K);
    return K;
}

KernelValue kernel_K1(const OperatorFamily& fam, std::size_t it, std::size_t is, double theta) {
    if (it >= fam.size() || is >= fam.size()) throw ValidationError("kernel_K1: time index out of range");
    if (!(is < it)) throw ValidationError("kernel_K1: need s < t");
    const double h = fam.time_grid().t(it) - fam.time_grid().t(is);
    const MatrixXd dA = fam.A(it) - fam.A(is);
    KernelValue kv;
    if (const Spectral* s = fam.spectral(it)) {
        kv.K = s->apply([h](double l) { return std::exp(-h * l); }) * dA;
        const MatrixXd L = s->apply([h, theta](double l) { return std::pow(l, theta) * std::exp(-h * l); });
        kv.scale_norm = norm2(L * dA * family_power(fam, is, -theta));
    } else {
        kv.K = family_semigroup(fam, it, h) * dA;
        kv.scale_norm = norm2(family_power(fam, it, theta) * kv.K * family_power(fam, is, -theta));
    }
    return kv;
}

KernelValue kernel_K2(const OperatorFamily& fam, std::size_t it, std::size_t is, double theta) {
    if (it >= fam.size() || is >= fam.size()) throw ValidationError("kernel_K2: time index out of range");
    if (!(is < it)) throw ValidationError("kernel_K2: need s < t");
    const double h = fam.time_grid().t(it) - fam.time_grid().t(is);
    KernelValue kv;
    kv.K = family_semigroup(fam, it, h);
    if (const Spectral* s = fam.spectral(it))
        kv.scale_norm = norm2(s->apply([h, theta](double l) { return std::pow(l, theta) * std::exp(-h * l); }));
    else
        kv.scale_norm = norm2(family_power(fam, it, theta) * kv.K);
    return kv;
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

template <class Eval>
SlopeFit kernel_slope(const OperatorFamily& fam, std::size_t max_lag_pow, Eval eval) {
    const auto& tg = fam.time_grid();
    if (!tg.uniform()) throw ValidationError("kernel slope fit: uniform time grid required");
    const std::size_t m = tg.m_steps();
    if (m < 4) throw ValidationError("kernel slope fit: need at least 4 steps");
    std::vector<std::size_t> lags;
    for (std::size_t L = 1; 2 * L <= m; L *= 2) {
        lags.push_back(L);
        if (max_lag_pow && lags.size() > max_lag_pow) break;
    }
    // warm the spectral cache in parallel, then evaluate every (t, t-L) pair
    const long nt = long(fam.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < nt; ++i) (void)fam.spectral(std::size_t(i));

    double lam_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const Spectral* sp = fam.spectral(i);
        if (!sp) {
            lam_min = 0.0;
            break;
        }
        lam_min = std::min(lam_min, sp->lambda.minCoeff());
    }
    SlopeFit fit;
    fit.h_fit_max = lam_min > 0.0 ? 1.0 / lam_min : std::numeric_limits<double>::infinity();
    std::vector<double> lx, ly;
    for (std::size_t L : lags) {
        double sup = 0.0;
        const long cnt = long(m + 1 - L);
#pragma omp parallel for reduction(max : sup) schedule(dynamic)
        for (long k = 0; k < cnt; ++k) {
            const std::size_t is = std::size_t(k), it = is + L;
            sup = std::max(sup, eval(it, is));
        }
        const double h = tg.t(L) - tg.t(0);
        fit.h.push_back(h);
        fit.sup_norm.push_back(sup);
        if (sup > 0.0 && (h <= fit.h_fit_max || lx.size() < 2)) {
            lx.push_back(std::log(h));
            ly.push_back(std::log(sup));
        }
    }
    fit.slope = lx.size() >= 2 ? ls_slope(lx, ly) : 0.0;
    return fit;
}

}  // namespace

SlopeFit kernel_slope_K1(const OperatorFamily& fam, double theta, std::size_t max_lag_pow) {
    return kernel_slope(fam, max_lag_pow,
                        [&](std::size_t it, std::size_t is) { return kernel_K1(fam, it, is, theta).scale_norm; });
}

SlopeFit kernel_slope_K2(const OperatorFamily& fam, double theta, std::size_t max_lag_pow) {
    return kernel_slope(fam, max_lag_pow,
                        [&](std::size_t it, std::size_t is) { return kernel_K2(fam, it, is, theta).scale_norm; });
}

}  // namespace maxreg
