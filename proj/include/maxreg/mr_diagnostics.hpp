#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxreg/norms.hpp"
#include "maxreg/volterra.hpp"

namespace maxreg {

struct MrParts {
    double u_lp;     // ||u||_{L^p}
    double udot_lp;  // ||u'||_{L^p}, u' = f - A(t) u
    double Au_lp;    // ||A(.) u(.)||_{L^p}
    double f_lp;
    double trace;    // trace norm of u0 (0 when u0 = 0)
    double w1p() const { return u_lp + udot_lp; }
};

struct MrConstant {
    double C_p;
    MrParts parts;
};

/// C_p = (||u||_{W^{1,p}} + ||Au||_{L^p}) / (||f||_{L^p} + trace(u0)). The state norm is the
/// grid L2 norm when the family carries a space grid, Euclidean otherwise.
MrConstant mr_constant(const OperatorFamily& fam, const Forcing& f, const Eigen::VectorXd& u0, double p,
                       Route route = Route::midpoint, double theta = 0.5);
/// Same measurement from operators built on the fly (midpoint or backward Euler only).
MrConstant mr_constant(const OperatorSource& src, const Forcing& f, const Eigen::VectorXd& u0, double p,
                       Scheme scheme = Scheme::implicit_midpoint);
/// Parts from a solution already computed.
MrConstant mr_parts(const OperatorSource& src, const Forcing& f, const Trajectory& u, const Eigen::VectorXd& u0,
                    double p);

struct SweepOptions {
    std::vector<double> alphas{1.0, 0.3};
    std::string generator = "auto";  // auto: lipschitz for alpha >= 1, weierstrass otherwise
    int levels = 3;
    int K0 = 4;             // series truncation at the coarsest level, +2 per level
    std::size_t m0 = 256;   // time steps at the coarsest level, x4 per level
    std::size_t n0 = 32;    // space cells at the coarsest level, x2 per level
    double T = 1.0;
    double p = 2.0;
    double theta = 0.5;
    Scheme scheme = Scheme::implicit_midpoint;
    bool parallel = true;
};

struct SweepCell {
    double alpha;
    int level;
    int K;
    std::size_t m;
    std::size_t n;
    double dt;
    double C_p;  // NaN when the cell failed
    std::string error;
};

struct SweepVerdict {
    double alpha;
    std::string verdict;  // "stable" | "growing"
    double drift;         // ratio of C_p across the two finest levels
    bool monotone_growth;
};

struct SweepTable {
    std::vector<SweepCell> cells;
    std::vector<SweepVerdict> verdicts;
};

/// Refinement schedule follows parabolic scaling: level l has K = K0 + 2l series terms,
/// m0 4^l time steps and n0 2^l space cells, so every level resolves its finest mode.
/// Forcing f = sin(pi x), u0 = 0, Dirichlet interval (0, 1).
SweepTable critical_sweep(const SweepOptions& opt);

struct KatoRatio {
    double min_ratio;
    double max_ratio;
    std::size_t samples;
};

/// ||A^{1/2} v|| / (||v|| + ||grad_h v||) in the grid L2 norm over seeded random vectors and
/// the eigenvector basis.
KatoRatio kato_ratio(const DiscreteOperator& A, std::size_t random_samples = 32, std::uint64_t seed = 1);
KatoRatio kato_ratio(const DiscreteOperator& A, const std::vector<Eigen::VectorXd>& samples);

}  // namespace maxreg
