#include "maxreg/generators.hpp"

#include <cmath>
#include <numbers>

#include "maxreg/error.hpp"
#include "maxreg/expression.hpp"

namespace maxreg::gen {

using std::numbers::pi;

Generator constant(double c) {
    if (!(c > 0.0)) throw ValidationError("constant generator: value must be positive");
    return {"constant", [c](double, double) { return c; }, c, 1.0};
}

Generator lipschitz() {
    return {"lipschitz", [](double t, double x) { return 2.0 + t * std::sin(pi * x); }, 1.0, 1.0};
}

Generator autonomous() {
    return {"autonomous", [](double, double x) { return 2.0 + std::sin(pi * x); }, 1.0, 1.0};
}

Generator weierstrass(double alpha, int K) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("weierstrass generator: alpha must lie in (0,1]");
    if (K < 0 || K > 40) throw ValidationError("weierstrass generator: K must lie in [0,40]");
    double S = 0.0;
    for (int k = 0; k <= K; ++k) S += std::pow(2.0, -alpha * k);
    auto f = [alpha, K, S](double t, double x) {
        double s = 0.0;
        for (int k = 0; k <= K; ++k)
            s += std::pow(2.0, -alpha * k) * std::cos(std::ldexp(pi, k) * t) *
                 std::cos(pi * std::pow(2.0, 0.5 * k) * x);
        return 2.0 + s / S;
    };
    return {"weierstrass", f, 1.0, alpha};
}

Generator expression(const std::string& src, double delta) {
    auto e = Expression::parse(src);
    if (e.depends_on('u')) throw ValidationError("coefficient expression may only use t and x");
    return {"expression", [e](double t, double x) { return e.eval(t, x); }, delta, 1.0};
}

Generator by_name(const std::string& name, double alpha, int K, double c) {
    if (name == "constant") return constant(c);
    if (name == "lipschitz") return lipschitz();
    if (name == "autonomous") return autonomous();
    if (name == "weierstrass") return weierstrass(alpha, K);
    throw ValidationError("unknown generator '" + name + "' (constant|lipschitz|autonomous|weierstrass)");
}

}  // namespace maxreg::gen
