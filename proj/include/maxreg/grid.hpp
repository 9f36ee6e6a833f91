#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace maxreg {

enum class Grading { uniform, geometric, explicit_nodes };

/// 1D spatial grid on [left, right]. All nodes are stored, including the two
/// Dirichlet boundary nodes; unknowns are nodes 1..n_interior.
class SpaceGrid {
public:
    static SpaceGrid uniform(double left, double right, std::size_t n_interior);
    /// Cells shrink geometrically toward `toward_left ? left : right`; ratio in (0,1).
    static SpaceGrid geometric(double left, double right, std::size_t n_interior, double ratio,
                               bool toward_left = true);
    static SpaceGrid from_nodes(std::vector<double> nodes);

    double left() const { return nodes_.front(); }
    double right() const { return nodes_.back(); }
    std::size_t n_interior() const { return nodes_.size() - 2; }
    std::size_t n_nodes() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    double x(std::size_t j) const { return nodes_[j]; }
    Grading grading() const { return grading_; }
    double ratio() const { return ratio_; }
    bool is_uniform() const;

    /// Dual cell width (x_{j+1} - x_{j-1}) / 2 for interior node j (1-based in node indexing).
    double dual_width(std::size_t j) const { return 0.5 * (nodes_[j + 1] - nodes_[j - 1]); }
    /// Interior dual widths, the quadrature weights of the discrete L2 norm.
    std::vector<double> interior_weights() const;

    bool same_as(const SpaceGrid& o) const { return nodes_ == o.nodes_; }

private:
    SpaceGrid(std::vector<double> nodes, Grading g, double ratio);
    std::vector<double> nodes_;
    Grading grading_;
    double ratio_ = 1.0;
};

/// Time nodes 0 = t_0 < ... < t_m = T.
class TimeGrid {
public:
    static TimeGrid uniform(double T, std::size_t m_steps);
    static TimeGrid from_nodes(std::vector<double> nodes);

    double T() const { return t_.back(); }
    std::size_t m_steps() const { return t_.size() - 1; }
    std::size_t n_nodes() const { return t_.size(); }
    std::span<const double> nodes() const { return t_; }
    double t(std::size_t i) const { return t_[i]; }
    double step(std::size_t i) const { return t_[i + 1] - t_[i]; }
    bool uniform() const { return uniform_; }

    bool same_as(const TimeGrid& o) const { return t_ == o.t_; }

private:
    TimeGrid(std::vector<double> t, bool uniform) : t_(std::move(t)), uniform_(uniform) {}
    std::vector<double> t_;
    bool uniform_;
};

}  // namespace maxreg
