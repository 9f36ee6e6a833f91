#include "maxreg/counterexample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "maxreg/error.hpp"
#include "maxreg/grid.hpp"
#include "maxreg/kernels.hpp"

namespace maxreg::critical {

namespace {

constexpr double kXb = 0.05;  // below this the x-integral moves to y = phi(x)
const double kInvE = std::exp(-1.0);

struct Rule {
    std::vector<double> x, w;  // on [-1, 1]
};

template <unsigned N>
Rule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(w[i]);
        } else {
            r.x.push_back(-a[i]);
            r.w.push_back(w[i]);
            r.x.push_back(a[i]);
            r.w.push_back(w[i]);
        }
    }
    return r;
}

const Rule& gl4() {
    static const Rule r = make_rule<4>();
    return r;
}
const Rule& gl6() {
    static const Rule r = make_rule<6>();
    return r;
}
const Rule& gl20() {
    static const Rule r = make_rule<20>();
    return r;
}

template <class F>
double integrate(const Rule& R, F&& f, double a, double b) {
    const double hm = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < R.x.size(); ++i) s += R.w[i] * f(c + hm * R.x[i]);
    return hm * s;
}

double xl(double x) { return -x * std::log(x); }
// c^2 w
double rho(double x) { return std::sqrt(xl(x)); }

/// int_a^b f cos(w y) dy for f linear between fa and fb.
double filon(double a, double b, double fa, double fb, double w, double sa, double ca, double sb, double cb) {
    const double L = b - a;
    if (L <= 0.0) return 0.0;
    if (std::abs(w) * L < 0.3) {
        const double slope = (fb - fa) / L;
        return integrate(gl4(), [&](double y) { return (fa + slope * (y - a)) * std::cos(w * y); }, a, b);
    }
    return (fb * sb - fa * sa) / w + (fb - fa) / L * (cb - ca) / (w * w);
}

/// Panels of the y = phi(x) integral for x in (eps, kXb], built from the graded spatial grid.
struct YPanels {
    std::vector<double> y, g;  // ascending y, g = rho |dx/dy|
};

YPanels build_panels(const CriticalExample& ex) {
    const SpaceGrid grid = SpaceGrid::geometric(ex.eps, 0.5, ex.nodes, ex.ratio, true);
    std::vector<double> xs;
    auto nodes = grid.nodes();
    for (std::size_t k = 0; k + 1 < nodes.size() && nodes[k] < kXb; ++k) {
        const double a = nodes[k], b = std::min(nodes[k + 1], kXb);
        for (std::size_t i = 0; i < ex.sub; ++i) xs.push_back(a * std::pow(b / a, double(i) / double(ex.sub)));
    }
    xs.push_back(kXb);
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    YPanels P;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
        const double x = *it, L = -std::log(x);
        P.y.push_back(phi(x));
        P.g.push_back(std::pow(xl(x), 3) / (1.5 * (L - 1.0)));
    }
    return P;
}

struct Increment {
    double G = 0.0;
    double inner = 0.0;  // part from x < psi^{-1}(r)
    double bound = 0.0;  // int rho min(4, r^2 phi^2)
};

class IncrementQuadrature {
public:
    explicit IncrementQuadrature(const CriticalExample& ex) : P_(build_panels(ex)) {}

    Increment operator()(double t, double s, bool with_bound = false) const {
        Increment out;
        const double r = std::abs(t - s);
        if (r == 0.0) return out;
        const double sig2 = t + s;
        const double ys = 2.0 / r;
        const std::array<double, 4> om{r, sig2, 2.0 * t, 2.0 * s};
        const std::size_t N = P_.y.size();

        std::array<double, 4> sa{}, ca{}, sb{}, cb{};
        auto trig = [&](double y, std::array<double, 4>& S, std::array<double, 4>& C) {
            for (int k = 0; k < 4; ++k) {
                S[k] = std::sin(om[k] * y);
                C[k] = std::cos(om[k] * y);
            }
        };
        // product form 2 sin^2(r y / 2) g (1 + cos(2 sigma y))
        auto outer = [&](double a, double b, double ga, double gb, const auto& Sa, const auto& Ca, const auto& Sb,
                         const auto& Cb) {
            const double ha = 2.0 * ga * std::pow(std::sin(0.5 * r * a), 2);
            const double hb = 2.0 * gb * std::pow(std::sin(0.5 * r * b), 2);
            return 0.5 * (b - a) * (ha + hb) + filon(a, b, ha, hb, om[1], Sa[1], Ca[1], Sb[1], Cb[1]);
        };
        // g (1 - cos r y + cos 2 sigma y - cos(2 t y)/2 - cos(2 s y)/2)
        auto inner = [&](double a, double b, double ga, double gb, const auto& Sa, const auto& Ca, const auto& Sb,
                         const auto& Cb) {
            double v = 0.5 * (b - a) * (ga + gb);
            v -= filon(a, b, ga, gb, om[0], Sa[0], Ca[0], Sb[0], Cb[0]);
            v += filon(a, b, ga, gb, om[1], Sa[1], Ca[1], Sb[1], Cb[1]);
            v -= 0.5 * filon(a, b, ga, gb, om[2], Sa[2], Ca[2], Sb[2], Cb[2]);
            v -= 0.5 * filon(a, b, ga, gb, om[3], Sa[3], Ca[3], Sb[3], Cb[3]);
            return v;
        };
        auto bound_panel = [&](double a, double b, double ga, double gb) {
            const double slope = (gb - ga) / (b - a);
            return integrate(gl4(), [&](double y) { return (ga + slope * (y - a)) * std::min(4.0, r * r * y * y); },
                             a, b);
        };

        trig(P_.y[0], sa, ca);
        for (std::size_t k = 0; k + 1 < N; ++k) {
            const double a = P_.y[k], b = P_.y[k + 1];
            const double ga = P_.g[k], gb = P_.g[k + 1];
            trig(b, sb, cb);
            if (b <= ys) {
                out.G += outer(a, b, ga, gb, sa, ca, sb, cb);
            } else if (a >= ys) {
                const double v = inner(a, b, ga, gb, sa, ca, sb, cb);
                out.G += v;
                out.inner += v;
            } else {
                const double gm = ga + (gb - ga) * (ys - a) / (b - a);
                std::array<double, 4> sm{}, cm{};
                trig(ys, sm, cm);
                out.G += outer(a, ys, ga, gm, sa, ca, sm, cm);
                const double v = inner(ys, b, gm, gb, sm, cm, sb, cb);
                out.G += v;
                out.inner += v;
            }
            if (with_bound) {
                if (a < ys && ys < b) {
                    const double gm = ga + (gb - ga) * (ys - a) / (b - a);
                    out.bound += bound_panel(a, ys, ga, gm) + bound_panel(ys, b, gm, gb);
                } else {
                    out.bound += bound_panel(a, b, ga, gb);
                }
            }
            sa = sb;
            ca = cb;
        }
        // x in [kXb, 1/2]: phi is bounded there, plain Gauss-Legendre in x
        const double sig = 0.5 * sig2;
        constexpr int kPanels = 8;
        const double hx = (0.5 - kXb) / kPanels;
        for (int k = 0; k < kPanels; ++k) {
            const double a = kXb + k * hx, b = a + hx;
            out.G += integrate(gl20(), [&](double x) {
                const double f = phi(x);
                return rho(x) * 4.0 * std::pow(std::cos(sig * f) * std::sin(0.5 * r * f), 2);
            }, a, b);
            out.inner += integrate(gl20(), [&](double x) {
                const double f = phi(x);
                if (r * f <= 2.0) return 0.0;
                return rho(x) * 4.0 * std::pow(std::cos(sig * f) * std::sin(0.5 * r * f), 2);
            }, a, b);
            if (with_bound)
                out.bound += integrate(gl20(), [&](double x) {
                    const double f = phi(x);
                    return rho(x) * std::min(4.0, r * r * f * f);
                }, a, b);
        }
        return out;
    }

private:
    YPanels P_;
};

}  // namespace

void CriticalExample::validate() const {
    if (!(eps > 0.0 && eps < std::exp(-2.0))) throw ValidationError("critical example: eps must lie in (0, e^-2)");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("critical example: grading ratio must lie in (0,1)");
    if (nodes < 2) throw ValidationError("critical example: need at least 2 grid nodes");
    if (sub < 1) throw ValidationError("critical example: sub must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("critical example: T must be positive");
    if (!std::isfinite(d)) throw ValidationError("critical example: d must be finite");
}

double c(double x) { return xl(x); }
double phi(double x) { return std::pow(xl(x), -1.5); }
double psi(double x) { return 2.0 * std::pow(xl(x), 1.5); }

double psi_inv(double r) {
    const double top = psi(kInvE);
    if (!(r > 0.0 && r < top)) throw ValidationError("psi_inv: r must lie in (0, psi(1/e))");
    double lo = -700.0, hi = -1.0;  // log x
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (psi(std::exp(mid)) < r ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double u(const CriticalExample& ex, double t, double x) { return c(x) * (std::sin(t * phi(x)) + ex.d); }

std::vector<TruncatedNorm> derivative_norm_truncated(const std::vector<double>& eps_list) {
    std::vector<TruncatedNorm> out;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        const double e = eps_list[k];
        if (!(e > 0.0 && e <= 0.5)) throw ValidationError("derivative_norm_truncated: eps must lie in (0, 1/2]");
        if (k > 0 && !(e < eps_list[k - 1])) throw ValidationError("derivative_norm_truncated: eps list must decrease");
        std::vector<double> parts;
        for (double a = e; a < 0.5; a *= 2.0) {
            const double b = std::min(2.0 * a, 0.5);
            parts.push_back(integrate(gl20(), [](double x) { return 1.0 / xl(x); }, a, b));
        }
        const double I = kernels::pairwise_sum(parts);
        out.push_back({e, I, std::log(std::abs(std::log(e))) - std::log(std::log(2.0))});
    }
    return out;
}

SinCheck sin_increment_bound_check(const CriticalExample& ex, std::size_t samples, std::uint64_t seed) {
    ex.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, ex.T), ulx(std::log(ex.eps), std::log(0.5));
    SinCheck out{-std::numeric_limits<double>::infinity(), 0.0, samples};
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = ut(rng), s = k % 100 == 0 ? t : ut(rng), x = std::exp(ulx(rng));
        const double f = phi(x), r = t - s;
        const double lhs = std::pow(2.0 * std::cos(0.5 * (t + s) * f) * std::sin(0.5 * r * f), 2);
        out.max_violation = std::max(out.max_violation, lhs - std::min(r * r * f * f, 4.0));
    }
    const SpaceGrid g = SpaceGrid::geometric(ex.eps, 0.5, ex.nodes, ex.ratio, true);
    for (double x : g.nodes()) out.crossover_error = std::max(out.crossover_error, std::abs(std::pow(psi(x) * phi(x), 2) - 4.0));
    return out;
}

InnerBounds inner_integral_bounds(double r) {
    const double top = psi(std::exp(-2.0));
    if (!(r > 0.0 && r < top)) throw ValidationError("inner_integral_bounds: r must lie in (0, psi(e^-2))");
    InnerBounds b;
    b.r = r;
    b.split = psi_inv(r);
    std::vector<double> p1, p2;
    for (double hi = b.split; hi > 1e-300; hi *= 0.5) {
        const double v = integrate(gl20(), rho, 0.5 * hi, hi);
        p1.push_back(v);
        if (v < 1e-20 * p1.front()) break;
    }
    for (double a = b.split; a < 0.5; a *= 2.0)
        p2.push_back(integrate(gl20(), [](double x) { return std::pow(xl(x), -2.5); }, a, std::min(2.0 * a, 0.5)));
    b.term1 = kernels::pairwise_sum(p1);
    b.term2 = kernels::pairwise_sum(p2);
    const double L = std::abs(std::log(r));
    b.bound1 = r / L;
    b.bound2 = 1.0 / (r * L);
    return b;
}

double increment_sq(const CriticalExample& ex, double t, double s) {
    ex.validate();
    return IncrementQuadrature(ex)(t, s).G;
}

double increment_sq_brute(const CriticalExample& ex, double t, double s) {
    ex.validate();
    const double om = std::max(std::abs(t), std::abs(s));
    std::vector<double> parts;
    double x = ex.eps;
    while (x < 0.5) {
        const double L = -std::log(x);
        const double dphi = 1.5 * std::pow(xl(x), -2.5) * std::max(std::abs(L - 1.0), 0.1);
        double h = std::min({0.01, 0.25 * x, om > 0.0 ? 0.5 / (om * dphi) : 0.01});
        h = std::min(h, 0.5 - x);
        parts.push_back(integrate(gl6(), [&](double y) {
            const double dv = u(ex, t, y) - u(ex, s, y);
            return std::pow(xl(y), -1.5) * dv * dv;
        }, x, x + h));
        x += h;
        if (parts.size() > 10'000'000) throw NumericalError("increment_sq_brute: phase too fast for direct quadrature");
    }
    return kernels::pairwise_sum(parts);
}

std::vector<CriticalNorm> critical_frac_sweep(const CriticalExample& ex, const std::vector<double>& qs,
                                              std::vector<double> cutoffs, bool parallel) {
    ex.validate();
    if (qs.empty()) throw ValidationError("critical_frac_sweep: empty q list");
    for (double q : qs)
        if (!(q > 1.5)) throw ValidationError("critical_frac_sweep: q must exceed 3/2");
    if (cutoffs.size() < 2) throw ValidationError("critical_frac_sweep: need at least two cutoffs");
    std::sort(cutoffs.begin(), cutoffs.end(), std::greater<>());
    if (!(cutoffs.back() > 0.0 && cutoffs.front() < ex.T))
        throw ValidationError("critical_frac_sweep: cutoffs must lie in (0, T)");

    const IncrementQuadrature Q(ex);
    // z = log r panels, every cutoff on a panel edge, width <= 1
    struct ZPanel {
        double a, b;
        std::size_t band;  // index of the smallest cutoff the panel needs
    };
    std::vector<double> edges{std::log(ex.T)};
    for (double c : cutoffs) edges.push_back(std::log(c));
    std::vector<ZPanel> panels;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double hi = edges[k], lo = edges[k + 1];
        const int n = std::max(1, int(std::ceil(hi - lo)));
        for (int i = 0; i < n; ++i)
            panels.push_back({lo + (hi - lo) * i / n, lo + (hi - lo) * (i + 1) / n, k});
    }
    // band k covers r in [cutoff_k, cutoff_{k-1}); band 0 is [cutoff_0, T)
    const Rule& R = gl6();
    struct RNode {
        double r, wz;
        std::size_t band;
        std::vector<double> ws, G, inner;
        double bound;
    };
    std::vector<RNode> rn;
    for (const auto& p : panels)
        for (std::size_t i = 0; i < R.x.size(); ++i) {
            const double z = 0.5 * (p.a + p.b) + 0.5 * (p.b - p.a) * R.x[i];
            rn.push_back({std::exp(z), 0.5 * (p.b - p.a) * R.w[i], p.band, {}, {}, {}, 0.0});
        }

    auto fill = [&](RNode& nd) {
        const double r = nd.r, len = ex.T - r;
        std::vector<double> br{0.0};
        for (double e = r; e < len; e *= 2.0) br.push_back(e);
        br.push_back(len);
        for (std::size_t k = 0; k + 1 < br.size(); ++k) {
            const double a = br[k], b = br[k + 1];
            if (b <= a) continue;
            for (std::size_t i = 0; i < R.x.size(); ++i) {
                const double s = 0.5 * (a + b) + 0.5 * (b - a) * R.x[i];
                const Increment inc = Q(s + r, s);
                nd.ws.push_back(0.5 * (b - a) * R.w[i]);
                nd.G.push_back(std::max(inc.G, 0.0));
                nd.inner.push_back(std::clamp(inc.inner, 0.0, std::max(inc.G, 0.0)));
            }
        }
        nd.bound = Q(r, 0.0, true).bound;
    };
    const long nr = long(rn.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < nr; ++k) fill(rn[std::size_t(k)]);
    } else {
        for (long k = 0; k < nr; ++k) fill(rn[std::size_t(k)]);
    }

    std::vector<CriticalNorm> out;
    for (double q : qs) {
        const std::size_t nb = cutoffs.size();
        std::vector<std::vector<double>> band_total(nb), band_inner(nb), band_bound(nb);
        for (const auto& nd : rn) {
            double tot = 0.0, in = 0.0;
            for (std::size_t i = 0; i < nd.ws.size(); ++i) {
                if (nd.G[i] <= 0.0) continue;
                const double v = nd.ws[i] * std::pow(nd.G[i], 0.5 * q);
                tot += v;
                in += v * nd.inner[i] / nd.G[i];
            }
            const double pre = 2.0 * nd.wz * std::pow(nd.r, -0.5 * q);
            band_total[nd.band].push_back(pre * tot);
            band_inner[nd.band].push_back(pre * in);
            band_bound[nd.band].push_back(pre * (ex.T - nd.r) * std::pow(nd.bound, 0.5 * q));
        }
        CriticalNorm cn;
        cn.q = q;
        cn.cutoffs = cutoffs;
        double acc = 0.0, acc_in = 0.0, acc_b = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
            acc += kernels::pairwise_sum(band_total[k]);
            acc_in += kernels::pairwise_sum(band_inner[k]);
            acc_b += kernels::pairwise_sum(band_bound[k]);
            cn.values.push_back(std::pow(acc, 1.0 / q));
        }
        cn.value = cn.values.back();
        const double prev = cn.values[nb - 2];
        cn.drift = cn.value > 0.0 ? std::abs(cn.value - prev) / cn.value : 0.0;
        cn.flagged = cn.drift > 0.1;
        cn.regime1_share = acc > 0.0 ? acc_in / acc : 0.0;
        cn.regime2_share = acc > 0.0 ? 1.0 - cn.regime1_share : 0.0;
        cn.bound = std::pow(acc_b, 1.0 / q);
        if (!std::isfinite(cn.value)) throw NumericalError("critical_frac_norm: non-finite value at q = " + std::to_string(q));
        out.push_back(std::move(cn));
    }
    return out;
}

CriticalNorm critical_frac_norm(const CriticalExample& ex, double q, std::vector<double> cutoffs) {
    return critical_frac_sweep(ex, {q}, std::move(cutoffs)).front();
}

}  // namespace maxreg::critical
