#pragma once

#include <functional>
#include <string>

namespace maxreg::gen {

/// Real coefficient a(t, x) together with the ellipticity floor it guarantees.
struct Generator {
    std::string name;
    std::function<double(double, double)> a;
    double delta;
    double holder_alpha;  // time regularity the construction certifies (1 = Lipschitz)
};

Generator constant(double c);

/// a(t,x) = 2 + t sin(pi x)
Generator lipschitz();

/// a(x) = 2 + sin(pi x), no time dependence
Generator autonomous();

/// Rough-in-time series with time-Hoelder exponent alpha:
///   a = 2 + (1/S) sum_{k=0}^{K} 2^{-alpha k} cos(2^k pi t) cos(pi 2^{k/2} x),  S = sum 2^{-alpha k}.
/// The spatial frequency 2^{k/2} is matched to the temporal one 2^k under parabolic scaling,
/// so level k excites modes whose decay rate is comparable to the forcing frequency.
/// Values stay in [1, 3], delta = 1.
Generator weierstrass(double alpha, int K);

/// Expression in t and x (see expression.hpp). delta must be supplied.
Generator expression(const std::string& src, double delta);

/// Dispatch by config name: constant, lipschitz, autonomous, weierstrass.
Generator by_name(const std::string& name, double alpha, int K, double c = 1.0);

}  // namespace maxreg::gen
