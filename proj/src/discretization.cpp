#include "maxreg/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "maxreg/error.hpp"

namespace maxreg {

// ---------------------------------------------------------------- grids

SpaceGrid::SpaceGrid(std::vector<double> nodes, Grading g, double ratio)
    : nodes_(std::move(nodes)), grading_(g), ratio_(ratio) {
    if (nodes_.size() < 3) throw ValidationError("SpaceGrid: need at least one interior node");
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        if (!(nodes_[j] > nodes_[j - 1]))
            throw ValidationError("SpaceGrid: nodes must be strictly increasing");
}

SpaceGrid SpaceGrid::uniform(double left, double right, std::size_t n_interior) {
    if (!(left < right)) throw ValidationError("SpaceGrid: need left < right");
    if (n_interior == 0) throw ValidationError("SpaceGrid: n_interior must be positive");
    const std::size_t N = n_interior + 1;
    std::vector<double> x(N + 1);
    for (std::size_t j = 0; j <= N; ++j) x[j] = left + (right - left) * double(j) / double(N);
    x.back() = right;
    return SpaceGrid(std::move(x), Grading::uniform, 1.0);
}

SpaceGrid SpaceGrid::geometric(double left, double right, std::size_t n_interior, double ratio,
                               bool toward_left) {
    if (!(left < right)) throw ValidationError("SpaceGrid: need left < right");
    if (n_interior == 0) throw ValidationError("SpaceGrid: n_interior must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("SpaceGrid: grading ratio must lie in (0,1)");
    const std::size_t N = n_interior + 1;
    // cell k (counted from the refined end) has width h0 * ratio^{-k}... i.e. widths grow away
    std::vector<double> w(N);
    double total = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        w[k] = std::pow(ratio, double(N - 1 - k));
        total += w[k];
    }
    std::vector<double> x(N + 1);
    x[0] = 0.0;
    for (std::size_t k = 0; k < N; ++k) x[k + 1] = x[k] + w[k] / total;
    for (auto& v : x) v = left + (right - left) * v;
    x.front() = left;
    x.back() = right;
    if (!toward_left) {
        std::vector<double> y(N + 1);
        for (std::size_t j = 0; j <= N; ++j) y[j] = left + right - x[N - j];
        x = std::move(y);
    }
    return SpaceGrid(std::move(x), Grading::geometric, ratio);
}

SpaceGrid SpaceGrid::from_nodes(std::vector<double> nodes) {
    SpaceGrid g(std::move(nodes), Grading::explicit_nodes, 1.0);
    if (g.is_uniform()) g.grading_ = Grading::uniform;
    return g;
}

bool SpaceGrid::is_uniform() const {
    const double h = (right() - left()) / double(nodes_.size() - 1);
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        if (std::abs((nodes_[j] - nodes_[j - 1]) - h) > 1e-12 * h) return false;
    return true;
}

std::vector<double> SpaceGrid::interior_weights() const {
    std::vector<double> w(n_interior());
    for (std::size_t j = 1; j + 1 < nodes_.size(); ++j) w[j - 1] = dual_width(j);
    return w;
}

TimeGrid TimeGrid::uniform(double T, std::size_t m_steps) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("TimeGrid: horizon T must be positive");
    if (m_steps == 0) throw ValidationError("TimeGrid: need at least one step");
    std::vector<double> t(m_steps + 1);
    for (std::size_t i = 0; i <= m_steps; ++i) t[i] = T * double(i) / double(m_steps);
    t.back() = T;
    return TimeGrid(std::move(t), true);
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2) throw ValidationError("TimeGrid: need at least two nodes");
    if (nodes.front() != 0.0) throw ValidationError("TimeGrid: first node must be 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw ValidationError("TimeGrid: nodes must be strictly increasing");
    const double h = nodes.back() / double(nodes.size() - 1);
    bool uni = true;
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (std::abs(nodes[i] - nodes[i - 1] - h) > 1e-12 * h) uni = false;
    return TimeGrid(std::move(nodes), uni);
}

// ---------------------------------------------------------------- coefficient field

CoefficientField::CoefficientField(TimeGrid tg, SpaceGrid sg, Eigen::MatrixXcd samples, double delta)
    : tg_(std::move(tg)), sg_(std::move(sg)), a_(std::move(samples)), delta_(delta) {
    if (!(delta_ > 0.0)) throw ValidationError("CoefficientField: ellipticity constant delta must be > 0");
    if (a_.rows() != Eigen::Index(tg_.n_nodes()) || a_.cols() != Eigen::Index(sg_.n_nodes()))
        throw ValidationError("CoefficientField: sample array does not match grids");
    if (!a_.allFinite()) throw ValidationError("CoefficientField: non-finite sample");
    sup_ = a_.cwiseAbs().maxCoeff();
}

CoefficientField CoefficientField::from_function(const TimeGrid& tg, const SpaceGrid& sg,
                                                 const std::function<cplx(double, double)>& a,
                                                 double delta) {
    Eigen::MatrixXcd s(tg.n_nodes(), sg.n_nodes());
    for (std::size_t i = 0; i < tg.n_nodes(); ++i)
        for (std::size_t j = 0; j < sg.n_nodes(); ++j) s(i, j) = a(tg.t(i), sg.x(j));
    return CoefficientField(tg, sg, std::move(s), delta);
}

CoefficientField CoefficientField::from_real_function(const TimeGrid& tg, const SpaceGrid& sg,
                                                      const std::function<double(double, double)>& a,
                                                      double delta) {
    return from_function(tg, sg, [&](double t, double x) { return cplx(a(t, x), 0.0); }, delta);
}

bool CoefficientField::is_real() const { return a_.imag().cwiseAbs().maxCoeff() == 0.0; }

CoefficientField load_coefficient_csv(const std::string& path, double delta) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open coefficient file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line != "t,x,re,im") throw ValidationError(path + ": header must be t,x,re,im");
    std::map<double, std::map<double, cplx>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        double v[4];
        for (int k = 0; k < 4; ++k) {
            std::string cell;
            if (!std::getline(ss, cell, ',')) throw ValidationError(path + ": short row at line " + std::to_string(lineno));
            try {
                std::size_t used = 0;
                v[k] = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ValidationError(path + ": bad number at line " + std::to_string(lineno));
            }
        }
        rows[v[0]][v[1]] = cplx(v[2], v[3]);
    }
    if (rows.empty()) throw ValidationError(path + ": no samples");
    std::vector<double> ts, xs;
    for (auto& [t, _] : rows) ts.push_back(t);
    for (auto& [x, _] : rows.begin()->second) xs.push_back(x);
    Eigen::MatrixXcd s(ts.size(), xs.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& r = rows[ts[i]];
        if (r.size() != xs.size()) throw ValidationError(path + ": samples do not form a tensor grid");
        std::size_t j = 0;
        for (auto& [x, val] : r) {
            if (x != xs[j]) throw ValidationError(path + ": samples do not form a tensor grid");
            s(i, j++) = val;
        }
    }
    return CoefficientField(TimeGrid::from_nodes(ts), SpaceGrid::from_nodes(xs), std::move(s), delta);
}

void save_coefficient_csv(const CoefficientField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << "t,x,re,im\n";
    char buf[128];
    for (std::size_t i = 0; i < f.time_grid().n_nodes(); ++i)
        for (std::size_t j = 0; j < f.space_grid().n_nodes(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", f.time_grid().t(i),
                          f.space_grid().x(j), f(i, j).real(), f(i, j).imag());
            out << buf;
        }
}

// ---------------------------------------------------------------- assembly

namespace {

template <class Scalar>
Scalar midpoint(Scalar a, Scalar b, MidpointRule rule) {
    if (rule == MidpointRule::arithmetic) return 0.5 * (a + b);
    return 2.0 * a * b / (a + b);
}

template <class Mat, class Vec>
Mat assemble_stencil(const Vec& a, const SpaceGrid& g, double shift, MidpointRule rule) {
    const std::size_t n = g.n_interior();
    Mat A = Mat::Zero(n, n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double hm = g.x(j) - g.x(j - 1);
        const double hp = g.x(j + 1) - g.x(j);
        const double hd = g.dual_width(j);
        auto am = midpoint(a[j - 1], a[j], rule);
        auto ap = midpoint(a[j], a[j + 1], rule);
        const std::size_t r = j - 1;
        A(r, r) = (ap / hp + am / hm) / hd + shift;
        if (j > 1) A(r, r - 1) = -am / hm / hd;
        if (j < n) A(r, r + 1) = -ap / hp / hd;
    }
    return A;
}

void check_field(const CoefficientField& field, std::size_t time_index, const SpaceGrid& grid, double shift) {
    if (!field.space_grid().same_as(grid)) throw ValidationError("assemble_operator: coefficient field not sampled on this grid");
    if (time_index >= field.time_grid().n_nodes()) throw ValidationError("assemble_operator: time index out of range");
    if (!(field.delta() > 0.0)) throw ValidationError("assemble_operator: delta must be > 0");
    if (!(shift >= 0.0)) throw ValidationError("assemble_operator: shift must be >= 0");
}

}  // namespace

DiscreteOperator assemble_operator(const CoefficientField& field, std::size_t time_index,
                                   const SpaceGrid& grid, double shift, MidpointRule rule) {
    check_field(field, time_index, grid, shift);
    if (field.samples().row(time_index).imag().cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("assemble_operator: complex coefficients only supported by assemble_complex_operator");
    return assemble_from_nodal(field.real_row(time_index), grid, shift, rule);
}

DiscreteOperator assemble_from_nodal(const Eigen::VectorXd& a, const SpaceGrid& grid, double shift,
                                     MidpointRule rule) {
    if (a.size() != Eigen::Index(grid.n_nodes())) throw ValidationError("assemble_from_nodal: coefficient size mismatch");
    if (!(shift >= 0.0)) throw ValidationError("assemble_from_nodal: shift must be >= 0");
    if (!(a.minCoeff() > 0.0)) throw ValidationError("assemble_from_nodal: coefficient must be positive");
    return {assemble_stencil<Eigen::MatrixXd>(a, grid, shift, rule), grid, shift};
}

Eigen::MatrixXcd assemble_complex_operator(const CoefficientField& field, std::size_t time_index,
                                           const SpaceGrid& grid, double shift) {
    check_field(field, time_index, grid, shift);
    Eigen::VectorXcd a = field.samples().row(time_index).transpose();
    return assemble_stencil<Eigen::MatrixXcd>(a, grid, shift, MidpointRule::arithmetic);
}

EllipticityResult ellipticity_check(const CoefficientField& field) {
    const double d = field.samples().real().minCoeff();
    return {d, d >= field.delta()};
}

// ---------------------------------------------------------------- VMO modulus

std::vector<double> vmo_modulus(std::span<const double> f, const SpaceGrid& grid,
                                std::span<const double> radii) {
    if (radii.empty()) throw ValidationError("vmo_modulus: empty radius list");
    for (double r : radii)
        if (!(r > 0.0)) throw ValidationError("vmo_modulus: radii must be positive");
    if (f.size() != grid.n_nodes()) throw ValidationError("vmo_modulus: sample count does not match grid");

    // Piecewise constant reconstruction: node j owns the dual cell [b_j, b_{j+1}].
    const std::size_t N = grid.n_nodes();
    std::vector<double> b(N + 1);
    b[0] = grid.left();
    b[N] = grid.right();
    for (std::size_t j = 1; j < N; ++j) b[j] = 0.5 * (grid.x(j - 1) + grid.x(j));
    // Prefix sums of (f - ref) with ref the value at the ball center, rebuilt per center: the
    // variance m2 - m1^2 then cancels against local deviations only, and is exactly 0 on flat data.
    std::vector<double> S1(N + 1, 0.0), S2(N + 1, 0.0);
    auto cell_of = [&](double y) {
        auto it = std::upper_bound(b.begin(), b.end(), y);
        return std::min<std::size_t>(std::max<std::ptrdiff_t>(it - b.begin() - 1, 0), N - 1);
    };
    double ref = 0.0;
    auto rebuild = [&](double c) {
        ref = f[cell_of(c)];
        for (std::size_t j = 0; j < N; ++j) {
            const double w = b[j + 1] - b[j], g = f[j] - ref;
            S1[j + 1] = S1[j] + w * g;
            S2[j + 1] = S2[j] + w * g * g;
        }
    };
    auto prim = [&](const std::vector<double>& S, double y, int pow) {
        // integral of (f - ref)^pow over [left, y]
        const std::size_t k = cell_of(y);
        const double g = f[k] - ref;
        return S[k] + (y - b[k]) * (pow == 1 ? g : g * g);
    };
    auto rms_osc = [&](double c, double rad) {
        const double lo = std::max(grid.left(), c - rad), hi = std::min(grid.right(), c + rad);
        const double len = hi - lo;
        if (len <= 0.0) return 0.0;
        const double m1 = (prim(S1, hi, 1) - prim(S1, lo, 1)) / len;
        const double m2 = (prim(S2, hi, 2) - prim(S2, lo, 2)) / len;
        return std::sqrt(std::max(0.0, m2 - m1 * m1));
    };

    // centers: nodes and dual-cell boundaries
    std::vector<double> centers(grid.nodes().begin(), grid.nodes().end());
    centers.insert(centers.end(), b.begin() + 1, b.end() - 1);

    std::vector<std::size_t> order(radii.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto a, auto c) { return radii[a] < radii[c]; });

    std::vector<double> eta(radii.size(), 0.0);
    for (double c : centers) {
        rebuild(c);
        // half-diameters at which the ball gains a breakpoint
        std::vector<double> bp;
        for (double y : b) {
            const double d = std::abs(y - c);
            if (d > 0.0) bp.push_back(d);
        }
        std::sort(bp.begin(), bp.end());
        std::size_t k = 0;
        double run = 0.0;
        for (std::size_t oi : order) {
            const double half = 0.5 * radii[oi];
            while (k < bp.size() && bp[k] <= half) run = std::max(run, rms_osc(c, bp[k++]));
            eta[oi] = std::max(eta[oi], std::max(run, rms_osc(c, half)));
        }
    }
    // sup over a nested family: enforce monotone order against rounding
    double run = 0.0;
    for (std::size_t oi : order) {
        run = std::max(run, eta[oi]);
        eta[oi] = run;
    }
    return eta;
}

}  // namespace maxreg
