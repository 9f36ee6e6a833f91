#include "maxreg/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "maxreg/error.hpp"

namespace maxreg {

Trajectory::Trajectory(TimeGrid g, std::vector<Eigen::VectorXd> v, std::string s)
    : grid(std::move(g)), values(std::move(v)), scale(std::move(s)) {
    if (values.size() != grid.n_nodes()) throw ValidationError("Trajectory: one state per time node required");
    const auto n = values.front().size();
    for (const auto& x : values)
        if (x.size() != n) throw ValidationError("Trajectory: state dimension must be constant");
}

Trajectory Trajectory::zeros(const TimeGrid& g, std::size_t dim) {
    return Trajectory(g, std::vector<Eigen::VectorXd>(g.n_nodes(), Eigen::VectorXd::Zero(Eigen::Index(dim))));
}

Trajectory Trajectory::from_function(const TimeGrid& g, const std::function<Eigen::VectorXd(double)>& f) {
    std::vector<Eigen::VectorXd> v;
    v.reserve(g.n_nodes());
    for (std::size_t i = 0; i < g.n_nodes(); ++i) v.push_back(f(g.t(i)));
    return Trajectory(g, std::move(v));
}

Trajectory Trajectory::scalar(const TimeGrid& g, const std::function<double(double)>& f) {
    return from_function(g, [&](double t) { return Eigen::VectorXd::Constant(1, f(t)); });
}

void save_trajectory_csv(const Trajectory& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << "t";
    for (std::size_t c = 0; c < u.dim(); ++c) out << ",component_" << c;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", u.grid.t(i));
        out << buf;
        for (Eigen::Index c = 0; c < u[i].size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", u[i](c));
            out << ',' << buf;
        }
        out << '\n';
    }
}

Trajectory load_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0) throw ValidationError(path + ": header must start with t,");
    const std::size_t dim = std::size_t(std::count(line.begin(), line.end(), ','));
    std::vector<double> ts;
    std::vector<Eigen::VectorXd> vals;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            double v;
            auto [q, ec] = std::from_chars(p, end, v);
            if (ec != std::errc()) throw ValidationError(path + ": bad number at line " + std::to_string(lineno));
            row.push_back(v);
            p = q;
            if (p < end && *p == ',') ++p;
            else if (p < end && *p != '\r') throw ValidationError(path + ": bad separator at line " + std::to_string(lineno));
            else break;
        }
        if (row.size() != dim + 1) throw ValidationError(path + ": wrong column count at line " + std::to_string(lineno));
        ts.push_back(row[0]);
        vals.push_back(Eigen::Map<Eigen::VectorXd>(row.data() + 1, Eigen::Index(dim)));
    }
    return Trajectory(TimeGrid::from_nodes(std::move(ts)), std::move(vals));
}

}  // namespace maxreg
