#include <doctest.h>

#include "../common/golden.hpp"
#include "maxreg/error.hpp"
#include "maxreg/exponent_planner.hpp"

using namespace maxreg;

namespace {

ExponentQuery query(const std::string& th, const std::string& p, const std::string& a, const std::string& q = "") {
    ExponentQuery x{parse_rational(th), parse_rational(p), parse_rational(a), std::nullopt};
    if (!q.empty()) x.q = parse_rational(q);
    return x;
}

}  // namespace

TEST_SUITE("exponent_planner") {

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/5") == Rational(3, 5));
    CHECK(parse_rational("0.6") == Rational(3, 5));
    CHECK(parse_rational("-2") == Rational(-2));
    CHECK(to_string(Rational(6, 4)) == "3/2");
    for (const char* bad : {"1e3", "inf", "nan", "1/0", "", "a/b", "1/2/3"})
        CHECK_THROWS_AS(parse_rational(bad), ValidationError);
}

TEST_CASE("golden table") {
    const auto rows = testing::load_planner_golden(MAXREG_TEST_DATA "/planner_golden.csv");
    REQUIRE(rows.size() == 200);
    int agree = 0;
    for (const auto& r : rows) {
        const auto res = mr_admissible(query(r.theta, r.p, r.alpha, r.q));
        const bool ok = (res.admissible ? "admissible" : "inadmissible") == r.verdict && res.rule == r.rule &&
                        to_string(res.q_required) == r.q_required;
        if (!ok) MESSAGE("mismatch at theta=" << r.theta << " p=" << r.p << " alpha=" << r.alpha << " q=" << r.q);
        agree += ok;
    }
    CHECK(agree == 200);
}

TEST_CASE("documented verdicts") {
    auto a = mr_admissible(query("1/2", "2", "0.6"));
    CHECK(a.admissible);
    CHECK(a.rule == "ii");
    CHECK(to_string(a.q_required) == "2");
    auto b = mr_admissible(query("1/2", "3/2", "0.6"));
    CHECK(b.admissible);
    CHECK(b.rule == "i");
    CHECK(to_string(b.q_required) == "2");
    CHECK_FALSE(mr_admissible(query("1/2", "2", "0.5")).admissible);
    CHECK(mr_admissible(query("1/2", "2", "0.5")).alpha_threshold == Rational(1, 2));
    CHECK_FALSE(mr_admissible(query("1/2", "2", "0.6", "3")).admissible);

    auto e = mr_admissible(query("1", "3", "1/10"));
    CHECK(e.rule == "i");
    CHECK_FALSE(e.q_required.has_value());
    CHECK(e.admissible);
    CHECK(std::find(e.flags.begin(), e.flags.end(), "holder_endpoint") != e.flags.end());
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(mr_admissible(query("0", "2", "1/2")), ValidationError);
    CHECK_THROWS_AS(mr_admissible(query("3/2", "2", "1/2")), ValidationError);
    CHECK_THROWS_AS(mr_admissible(query("1/2", "1", "1/2")), ValidationError);
    CHECK_THROWS_AS(mr_admissible(query("1/2", "2", "1")), ValidationError);
}

TEST_CASE("bootstrap ladder") {
    auto a = bootstrap_ladder(Rational(1, 2), Rational(4), Rational(3, 5));
    REQUIRE(a.ladder.size() == 1);
    CHECK(a.ladder[0].rule == "a");
    CHECK_FALSE(a.ladder[0].q.has_value());

    auto c = bootstrap_ladder(Rational(1, 2), Rational(3, 2), Rational(3, 5));
    REQUIRE(c.ladder.size() == 2);
    CHECK(c.ladder[0].rule == "c");
    CHECK(*c.ladder[0].q == Rational(6));
    CHECK(c.ladder[0].binding == "S2");
    CHECK(c.ladder[1].rule == "a");

    auto b = bootstrap_ladder(Rational(1, 2), Rational(2), Rational(3, 5));
    REQUIRE(b.ladder.size() == 1);
    CHECK(b.ladder[0].rule == "b");
    CHECK(b.ladder[0].any_finite_q);

    auto m = bootstrap_ladder(Rational(1), Rational(3, 2), Rational(1, 2));
    REQUIRE(m.ladder.size() == 1);
    CHECK(m.ladder[0].rule == "a");
    CHECK(std::find(m.flags.begin(), m.flags.end(), "marginal_kernel") != m.flags.end());

    // S1 binds when alpha is small: p/(1 - p alpha) below p/(1 - p/4)
    auto s1 = bootstrap_ladder(Rational(1, 4), Rational(5, 4), Rational(1, 10));
    REQUIRE_FALSE(s1.ladder.empty());
    CHECK(s1.ladder[0].binding == "S1");
    CHECK(*s1.ladder[0].q == Rational(10, 7));
}

TEST_CASE("ladder rungs satisfy their named case") {
    for (const char* th : {"1/4", "1/3", "1/2", "2/3", "3/4"})
        for (const char* p : {"5/4", "3/2", "2", "3"})
            for (const char* al : {"1/10", "1/3", "3/5", "9/10"}) {
                const Rational t = parse_rational(th), a = parse_rational(al);
                const auto lad = bootstrap_ladder(t, parse_rational(p), a);
                REQUIRE_FALSE(lad.ladder.empty());
                for (const auto& r : lad.ladder) CHECK(rung_consistent(r, t, a));
                const auto& last = lad.ladder.back();
                CHECK((last.rule == "a" || last.rule == "b"));
            }
}

}
