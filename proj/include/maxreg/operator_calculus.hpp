#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/discretization.hpp"
#include "maxreg/grid.hpp"

namespace maxreg {

/// Real diagonalization A = V diag(lambda) V^{-1} used as the default matrix-function backend.
struct Spectral {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd V;
    Eigen::MatrixXd Vinv;

    /// Fails (nullopt) for non-real spectra or eigenvector condition number above 1e8.
    static std::optional<Spectral> try_decompose(const Eigen::MatrixXd& A);

    template <class F>
    Eigen::MatrixXd apply(F&& f) const {
        Eigen::VectorXd d = lambda.unaryExpr(f);
        return V * d.asDiagonal() * Vinv;
    }
};

/// Largest singular value.
double norm2(const Eigen::MatrixXd& M);

/// e^{-tau A}.
Eigen::MatrixXd semigroup(const Eigen::MatrixXd& A, double tau);
Eigen::MatrixXd semigroup(const DiscreteOperator& A, double tau);

/// Principal power A^theta, theta in [-1, 1].
Eigen::MatrixXd frac_power(const Eigen::MatrixXd& A, double theta);
Eigen::MatrixXd frac_power(const DiscreteOperator& A, double theta);

/// ||A^theta x||_2
double theta_norm(const Eigen::MatrixXd& A, double theta, const Eigen::VectorXd& x);
double theta_norm(const DiscreteOperator& A, double theta, const Eigen::VectorXd& x);

struct SectorReport {
    double phi;
    double bound;  // max of (|lambda|+1) ||R(lambda, A)|| over the sampled lambda
    bool eigenvalues_in_sector;
    double r_bound;  // same number; R-boundedness reduces to uniform boundedness here
    std::string note;
};

SectorReport sectoriality_report(const Eigen::MatrixXcd& A, double phi, int lambda_samples = 200);
SectorReport sectoriality_report(const DiscreteOperator& A, double phi, int lambda_samples = 200);

struct RegularityCertificate {
    enum class Kind { holder, frac_sobolev } kind = Kind::holder;
    double alpha = 1.0;
    double C = 0.0;
    double q = 0.0;  // only for frac_sobolev
};

/// Operators A(t_i) on a common space, one per time node. Matrix functions of each
/// A(t_i) go through a lazily built, thread-safe spectral cache.
class OperatorFamily {
public:
    OperatorFamily(TimeGrid tg, std::vector<Eigen::MatrixXd> ops,
                   std::optional<SpaceGrid> grid = std::nullopt);

    static OperatorFamily from_field(const CoefficientField& field, double shift = 0.0,
                                     MidpointRule rule = MidpointRule::arithmetic);
    static OperatorFamily from_function(const TimeGrid& tg,
                                        const std::function<Eigen::MatrixXd(double)>& A,
                                        std::optional<SpaceGrid> grid = std::nullopt);

    const TimeGrid& time_grid() const { return tg_; }
    const std::optional<SpaceGrid>& space_grid() const { return grid_; }
    std::size_t dim() const { return static_cast<std::size_t>(ops_.front().rows()); }
    std::size_t size() const { return ops_.size(); }
    const Eigen::MatrixXd& A(std::size_t i) const { return ops_[i]; }
    const std::vector<Eigen::MatrixXd>& operators() const { return ops_; }

    /// nullptr when A(t_i) is not safely diagonalizable.
    const Spectral* spectral(std::size_t i) const;

    bool autonomous() const;
    bool tridiagonal() const { return tridiagonal_; }

    const std::optional<RegularityCertificate>& certificate() const { return cert_; }
    void set_certificate(RegularityCertificate c) { cert_ = c; }

    std::optional<double> stability_constant() const { return K_; }
    void set_stability_constant(double K) { K_ = K; }

private:
    TimeGrid tg_;
    std::vector<Eigen::MatrixXd> ops_;
    std::optional<SpaceGrid> grid_;
    std::optional<RegularityCertificate> cert_;
    std::optional<double> K_;
    bool tridiagonal_ = false;
    std::vector<std::size_t> run_start_;  // first index of the run of identical operators

    struct Cache {
        std::vector<std::once_flag> once;
        std::vector<std::optional<Spectral>> spec;
        explicit Cache(std::size_t n) : once(n), spec(n) {}
    };
    std::shared_ptr<Cache> cache_;
};

/// f(A(t_i)) through the cache with a Pade/Schur fallback for exp and powers.
Eigen::MatrixXd family_semigroup(const OperatorFamily& fam, std::size_t i, double tau);
Eigen::MatrixXd family_power(const OperatorFamily& fam, std::size_t i, double theta);

/// K = max_t max(||A(t)^th A(0)^-th||, ||A(0)^th A(t)^-th||); stored in the family.
double theta_stability_constant(OperatorFamily& fam, double theta);

struct KernelValue {
    Eigen::MatrixXd K;
    double scale_norm;
};

/// K1(t,s) = e^{-(t-s)A(t)} (A(t) - A(s)), scale norm ||A(t)^th K1 A(s)^-th||.
KernelValue kernel_K1(const OperatorFamily& fam, std::size_t it, std::size_t is, double theta);
/// K2(t,s) = e^{-(t-s)A(t)}, scale norm ||A(t)^th K2||.
KernelValue kernel_K2(const OperatorFamily& fam, std::size_t it, std::size_t is, double theta);

struct SlopeFit {
    std::vector<double> h;
    std::vector<double> sup_norm;
    double slope;
    double h_fit_max;  // lags beyond 1/lambda_min are left out of the fit
};

/// Sup over |t-s| = h of the kernel scale norms on dyadic lags, with a log-log slope fit over
/// the short-time lags h <= 1/lambda_min, where the exponential decay of the semigroup has not
/// set in (at least the two smallest lags are always used). Parallel over pairs.
SlopeFit kernel_slope_K1(const OperatorFamily& fam, double theta, std::size_t max_lag_pow = 0);
SlopeFit kernel_slope_K2(const OperatorFamily& fam, double theta, std::size_t max_lag_pow = 0);

}  // namespace maxreg
