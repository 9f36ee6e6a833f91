#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxreg/grid.hpp"

namespace maxreg {

/// One state vector per time node.
struct Trajectory {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> values;
    std::string scale = "X";  // which norm scale the states live on

    Trajectory(TimeGrid g, std::vector<Eigen::VectorXd> v, std::string scale = "X");

    static Trajectory zeros(const TimeGrid& g, std::size_t dim);
    static Trajectory from_function(const TimeGrid& g, const std::function<Eigen::VectorXd(double)>& f);
    /// Scalar trajectory t -> f(t).
    static Trajectory scalar(const TimeGrid& g, const std::function<double(double)>& f);

    std::size_t dim() const { return static_cast<std::size_t>(values.front().size()); }
    std::size_t size() const { return values.size(); }
    const Eigen::VectorXd& operator[](std::size_t i) const { return values[i]; }
    Eigen::VectorXd& operator[](std::size_t i) { return values[i]; }
};

/// CSV `t,component_0,...,component_{n-1}` with 17 significant digits (bit-exact round trip).
void save_trajectory_csv(const Trajectory& u, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

}  // namespace maxreg
