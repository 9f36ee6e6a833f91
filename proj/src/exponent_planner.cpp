#include "maxreg/exponent_planner.hpp"

#include <cctype>

#include "maxreg/error.hpp"

namespace maxreg {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Rational one() { return Rational(1); }

}  // namespace

Rational parse_rational(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    const std::string bad = "'" + raw + "' is not an exact rational (use an integer, a/b or a finite decimal)";
    bool neg = false;
    std::string body = s;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
        neg = body[0] == '-';
        body.erase(0, 1);
    }
    Rational r;
    if (auto slash = body.find('/'); slash != std::string::npos) {
        const std::string a = body.substr(0, slash), b = body.substr(slash + 1);
        if (!all_digits(a) || !all_digits(b)) throw ValidationError(bad);
        boost::multiprecision::cpp_int den(b);
        if (den == 0) throw ValidationError("'" + raw + "': zero denominator");
        r = Rational(boost::multiprecision::cpp_int(a), den);
    } else if (auto dot = body.find('.'); dot != std::string::npos) {
        const std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
        if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
            throw ValidationError(bad);
        boost::multiprecision::cpp_int num(ip.empty() ? "0" : ip);
        boost::multiprecision::cpp_int den = 1;
        for (char c : fp) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        r = Rational(num, den);
    } else {
        if (!all_digits(body)) throw ValidationError(bad);
        r = Rational(boost::multiprecision::cpp_int(body));
    }
    return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const ExtRational& q) { return q ? to_string(*q) : std::string("inf"); }

void validate(const ExponentQuery& q) {
    if (!(q.theta > 0 && q.theta <= 1)) throw ValidationError("theta must lie in (0,1], got " + to_string(q.theta));
    if (!(q.p > 1)) throw ValidationError("p must lie in (1,inf), got " + to_string(q.p));
    if (!(q.alpha > 0 && q.alpha < 1)) throw ValidationError("alpha must lie in (0,1), got " + to_string(q.alpha));
    if (q.q && !(*q.q > 1)) throw ValidationError("q must lie in (1,inf), got " + to_string(*q.q));
}

PlanResult mr_admissible(const ExponentQuery& query) {
    validate(query);
    PlanResult r;
    r.alpha_threshold = one() - query.theta;
    const bool alpha_ok = query.alpha > r.alpha_threshold;

    if (query.theta == 1) {
        r.rule = "i";
        r.q_required = std::nullopt;
        r.flags.push_back("holder_endpoint");
        r.trace.push_back("theta = 1: 1/(1-theta) is infinite, every finite p is case (i) with q = inf");
        if (query.q) {
            r.flags.push_back("q_unchecked");
            r.trace.push_back("supplied q = " + to_string(*query.q) + " not compared at the endpoint");
        }
    } else {
        const Rational c = one() / (one() - query.theta);
        if (query.p < c) {
            r.rule = "i";
            r.q_required = c;
            r.trace.push_back("p = " + to_string(query.p) + " < 1/(1-theta) = " + to_string(c) + ": case (i), q = " +
                              to_string(c));
        } else {
            r.rule = "ii";
            r.q_required = query.p;
            r.trace.push_back("p = " + to_string(query.p) + " >= 1/(1-theta) = " + to_string(c) + ": case (ii), q = p");
        }
    }
    r.trace.push_back("alpha = " + to_string(query.alpha) + (alpha_ok ? " > " : " <= ") + "1-theta = " +
                      to_string(r.alpha_threshold));
    r.admissible = alpha_ok;
    if (query.q && r.q_required && *query.q != *r.q_required) {
        r.admissible = false;
        r.trace.push_back("supplied q = " + to_string(*query.q) + " differs from required q = " +
                          to_string(*r.q_required));
    }
    return r;
}

PlanResult bootstrap_ladder(const Rational& theta, const Rational& p_start, const Rational& alpha) {
    validate({theta, p_start, alpha, std::nullopt});
    PlanResult r;
    r.alpha_threshold = one() - theta;
    r.admissible = true;
    if (theta == 1) {
        r.flags.push_back("marginal_kernel");
        r.ladder.push_back({p_start, std::nullopt, false, "a", ""});
        r.rule = "a";
        r.q_required = std::nullopt;
        r.trace.push_back("theta = 1: kernel exponent -1 is marginal, q = inf at once");
        return r;
    }
    const Rational gap = one() - theta;
    const Rational c = one() / gap;
    Rational p = p_start;
    constexpr std::size_t kMaxRungs = 100000;
    for (std::size_t k = 0;; ++k) {
        if (k >= kMaxRungs) throw NumericalError("bootstrap_ladder: rung limit reached");
        if (p > c) {
            r.ladder.push_back({p, std::nullopt, false, "a", ""});
            r.trace.push_back("p = " + to_string(p) + " > " + to_string(c) + ": case (a), q = inf");
            r.rule = "a";
            r.q_required = std::nullopt;
            break;
        }
        if (p == c) {
            r.ladder.push_back({p, std::nullopt, true, "b", ""});
            r.trace.push_back("p = " + to_string(p) + " = " + to_string(c) + ": case (b), every finite q");
            r.rule = "b";
            r.q_required = std::nullopt;
            r.flags.push_back("any_finite_q");
            break;
        }
        const Rational q2 = p / (one() - p * gap);
        ExtRational q1;
        if (alpha < 1 && p < one() / alpha) q1 = p / (one() - p * alpha);
        const bool s1_binds = q1 && *q1 < q2;
        const Rational q = s1_binds ? *q1 : q2;
        r.ladder.push_back({p, q, false, "c", s1_binds ? "S1" : "S2"});
        r.trace.push_back("p = " + to_string(p) + ": case (c), S2 cap " + to_string(q2) + ", S1 cap " +
                          to_string(q1) + ", q = " + to_string(q) + " (" + (s1_binds ? "S1" : "S2") + " binds)");
        p = q;
    }
    r.trace.push_back(std::to_string(r.ladder.size()) + " rung(s)");
    return r;
}

bool rung_consistent(const Rung& r, const Rational& theta, const Rational& alpha) {
    if (theta == 1) return r.rule == "a" && !r.q;
    // compare reciprocals: case boundary at 1/p = 1 - theta
    const Rational inv_p = one() / r.p;
    const Rational gap = one() - theta;
    if (r.rule == "a") return inv_p < gap && !r.q && !r.any_finite_q;
    if (r.rule == "b") return inv_p == gap && r.any_finite_q;
    if (r.rule != "c" || !r.q || !(inv_p > gap)) return false;
    const Rational inv_q = one() / *r.q;
    const Rational s2 = inv_p - gap;
    const bool s1_active = alpha < 1 && inv_p > alpha;
    const Rational s1 = inv_p - alpha;
    // the binding cap is the smaller q, i.e. the larger reciprocal
    if (r.binding == "S2") return inv_q == s2 && (!s1_active || s2 >= s1);
    if (r.binding == "S1") return s1_active && inv_q == s1 && s1 > s2;
    return false;
}

}  // namespace maxreg
