#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/grid.hpp"

namespace maxreg {

using cplx = std::complex<double>;

/// Samples a(t_i, x_j) on TimeGrid x SpaceGrid (all space nodes, boundary included).
class CoefficientField {
public:
    CoefficientField(TimeGrid tg, SpaceGrid sg, Eigen::MatrixXcd samples, double delta);

    static CoefficientField from_function(const TimeGrid& tg, const SpaceGrid& sg,
                                          const std::function<cplx(double, double)>& a,
                                          double delta);
    static CoefficientField from_real_function(const TimeGrid& tg, const SpaceGrid& sg,
                                               const std::function<double(double, double)>& a,
                                               double delta);

    const TimeGrid& time_grid() const { return tg_; }
    const SpaceGrid& space_grid() const { return sg_; }
    const Eigen::MatrixXcd& samples() const { return a_; }
    cplx operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
    double delta() const { return delta_; }
    double sup_norm() const { return sup_; }
    bool is_real() const;
    /// Real parts of row i (all space nodes).
    Eigen::VectorXd real_row(std::size_t i) const { return a_.row(i).real().transpose(); }

private:
    TimeGrid tg_;
    SpaceGrid sg_;
    Eigen::MatrixXcd a_;
    double delta_;
    double sup_;
};

/// CSV with header `t,x,re,im`, rows in any order, must cover a full tensor grid.
CoefficientField load_coefficient_csv(const std::string& path, double delta);
void save_coefficient_csv(const CoefficientField& f, const std::string& path);

enum class MidpointRule { arithmetic, harmonic };

/// -div(a grad) + shift on the interior nodes, Dirichlet rows eliminated.
struct DiscreteOperator {
    Eigen::MatrixXd A;
    SpaceGrid grid;
    double shift = 0.0;

    std::size_t order() const { return static_cast<std::size_t>(A.rows()); }
    bool tridiagonal() const { return true; }
};

DiscreteOperator assemble_operator(const CoefficientField& field, std::size_t time_index,
                                   const SpaceGrid& grid, double shift = 0.0,
                                   MidpointRule rule = MidpointRule::arithmetic);

/// Same stencil from nodal values a_j on all nodes (used for frozen coefficients a(v)).
DiscreteOperator assemble_from_nodal(const Eigen::VectorXd& a_nodes, const SpaceGrid& grid,
                                     double shift = 0.0,
                                     MidpointRule rule = MidpointRule::arithmetic);

/// Complex-coefficient version, only used for resolvent/sectoriality probes.
Eigen::MatrixXcd assemble_complex_operator(const CoefficientField& field, std::size_t time_index,
                                           const SpaceGrid& grid, double shift = 0.0);

struct EllipticityResult {
    double delta_observed;
    bool pass;
};

EllipticityResult ellipticity_check(const CoefficientField& field);

/// Discrete VMO modulus eta_f(r) for each r. f holds samples on all grid nodes and is
/// read as piecewise constant on dual cells.
std::vector<double> vmo_modulus(std::span<const double> f, const SpaceGrid& grid,
                                std::span<const double> radii);

}  // namespace maxreg
