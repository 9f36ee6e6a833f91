#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace maxreg {

using Rational = boost::multiprecision::cpp_rational;

/// Accepts "3", "-2", "3/5" and finite decimals such as "0.6" (read exactly as 3/5).
/// Anything else, including exponents, inf and nan, throws ValidationError.
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct ExponentQuery {
    Rational theta;  // (0, 1]
    Rational p;      // (1, inf)
    Rational alpha;  // (0, 1)
    std::optional<Rational> q;
};

void validate(const ExponentQuery& q);

/// q value in a rung or verdict; nullopt is q = infinity.
using ExtRational = std::optional<Rational>;
std::string to_string(const ExtRational& q);

struct Rung {
    Rational p;
    ExtRational q;       // largest target exponent reached from p (nullopt = infinity)
    bool any_finite_q;   // case (b): every finite q, but not infinity
    std::string rule;    // "a" | "b" | "c"
    std::string binding; // for case (c): "S1" or "S2"; empty otherwise
};

struct PlanResult {
    bool admissible = false;
    std::string rule;            // "i" | "ii" for mr_admissible; terminating rule for the ladder
    ExtRational q_required;      // nullopt = infinity
    Rational alpha_threshold;    // 1 - theta; admissibility needs alpha strictly above
    std::vector<std::string> flags;
    std::vector<Rung> ladder;
    std::vector<std::string> trace;  // human-readable rule trace
};

/// Two cases split at p = 1/(1-theta): below it q must be 1/(1-theta), from it on q = p.
/// Both need alpha > 1 - theta. A supplied q must equal the required one.
/// theta = 1 puts every p in case (i) with q = infinity and raises the flag
/// "holder_endpoint"; the verdict then rests on alpha alone.
PlanResult mr_admissible(const ExponentQuery& query);

/// Integrability ladder p -> q. Each rung applies the S2 cap p/(1 - p(1-theta)) and, when
/// alpha < 1 and p < 1/alpha, the S1 cap p/(1 - p alpha); the smaller cap binds. The ladder
/// stops at p > 1/(1-theta) (q = infinity, rule a) or p = 1/(1-theta) (any finite q, rule b).
PlanResult bootstrap_ladder(const Rational& theta, const Rational& p_start, const Rational& alpha);

/// Independent predicate: does rung r satisfy the case it names?
bool rung_consistent(const Rung& r, const Rational& theta, const Rational& alpha);

}  // namespace maxreg
