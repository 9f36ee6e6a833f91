#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cli_app.hpp"
#include "maxreg/config.hpp"
#include "maxreg/error.hpp"
#include "maxreg/norms.hpp"
#include "maxreg/report.hpp"

using namespace maxreg;
namespace fs = std::filesystem;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
    const auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

nlohmann::json read_report(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "report.json");
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults round trip through text") {
    const auto d = RunConfig::defaults();
    auto back = RunConfig::defaults();
    back.merge(RunConfig::parse(d.to_text()));
    CHECK(back == d);
    CHECK(RunConfig::parse(d.to_text()) == d);
}

TEST_CASE("typed values") {
    auto c = RunConfig::defaults();
    c.merge(RunConfig::parse("# runs\n[grid]\nm = 400 # steps\n[sweep]\nalphas = [1, 0.5, 0.25]\n[plan]\nalpha = \"3/5\"\n"));
    CHECK(c.count("grid", "m") == 400);
    CHECK(c.list("sweep", "alphas") == std::vector<double>{1, 0.5, 0.25});
    CHECK(c.rational("plan", "alpha") == Rational(3, 5));
    CHECK(c.list("qlp", "threshold_scales").empty());
    CHECK_THROWS_AS(c.num("solve", "generator"), ValidationError);
    CHECK_THROWS_AS(c.set("grid", "h", "1"), ValidationError);
}

TEST_CASE("malformed input") {
    auto c = RunConfig::defaults();
    CHECK_THROWS_AS(c.merge(RunConfig::parse("[nosuch]\na = 1\n")), ValidationError);
    CHECK_THROWS_AS(c.merge(RunConfig::parse("[grid]\nnosuch = 1\n")), ValidationError);
    CHECK_THROWS_AS(RunConfig::parse("[grid]\nm = 1\nm = 2\n"), ValidationError);
    CHECK_THROWS_AS(RunConfig::parse("m = 1\n"), ValidationError);
    CHECK_THROWS_AS(RunConfig::parse("[grid]\nm\n"), ValidationError);
}

}

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
    CHECK(cli::run(std::vector<std::string>{"maxreg"}) == 2);
    CHECK(cli::run(std::vector<std::string>{"maxreg", "frobnicate"}) == 2);
    CHECK(cli::run(std::vector<std::string>{"maxreg", "plan", "--bogus", "1"}) == 2);
    CHECK(cli::run(std::vector<std::string>{"maxreg", "plan", "--theta", "1e-1"}) == 2);
    const auto bad = write_file("maxreg_bad.ini", "[grid]\nsteps = 3\n");
    CHECK(cli::run(std::vector<std::string>{"maxreg", "--config", bad, "solve"}) == 2);
}

TEST_CASE("plan prints the case (ii) verdict") {
    const auto out = (fs::temp_directory_path() / "maxreg_plan").string();
    CHECK(cli::run(std::vector<std::string>{"maxreg", "plan", "--theta", "1/2", "--p", "2", "--alpha", "3/5",
                                            "--out", out}) == 0);
    const auto j = read_report(out);
    CHECK(j["schema"] == "maxreg/1");
    CHECK(j["stages"]["plan"]["verdict"] == "admissible");
    CHECK(j["stages"]["plan"]["rule"] == "ii");
    CHECK(j["stages"]["plan"]["q_required"] == "2");
}

TEST_CASE("scalar solve reports u(T)") {
    const auto cfg = write_file("maxreg_scalar.ini",
                                "[grid]\nm = 1000\n[solve]\nspace = scalar\ngenerator = constant\nc = 1\n"
                                "forcing = 1\nroute = integral\n");
    const auto out = (fs::temp_directory_path() / "maxreg_solve").string();
    REQUIRE(cli::run(std::vector<std::string>{"maxreg", "--config", cfg, "--out", out, "solve"}) == 0);
    const auto j = read_report(out);
    CHECK(std::abs(j["stages"]["solve"]["u_T"].get<double>() - (1 - std::exp(-1.0))) <= 1e-8);
    CHECK(fs::exists(fs::path(out) / "solution.csv"));
}

TEST_CASE("non-finite input data is a validation error") {
    const auto cfg = write_file("maxreg_nan.ini",
                                "[grid]\nm = 10\n[solve]\nspace = scalar\ngenerator = constant\nforcing = log(0-1)\n");
    const auto out = (fs::temp_directory_path() / "maxreg_nan").string();
    CHECK(cli::run(std::vector<std::string>{"maxreg", "--config", cfg, "--out", out, "solve"}) == 2);
}

TEST_CASE("report locates the first NaN") {
    Report rep("solve", RunConfig::defaults());
    rep.stage("solve")["u_T"] = 1.0;
    CHECK_FALSE(rep.first_nan().has_value());
    rep.stage("kato")["ratios"] = nlohmann::json::array({0.5, std::nan("")});
    REQUIRE(rep.first_nan().has_value());
    CHECK(*rep.first_nan() == "/stages/kato/ratios/1");
    CHECK(jnum(kInfinity) == "inf");
}

TEST_CASE("identical config gives identical CSV bytes") {
    const auto cfg = write_file("maxreg_det.ini", "[grid]\nm = 50\nn = 9\n[solve]\ngenerator = weierstrass\n");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto a = (fs::temp_directory_path() / "maxreg_det_a").string();
    const auto b = (fs::temp_directory_path() / "maxreg_det_b").string();
    REQUIRE(cli::run(std::vector<std::string>{"maxreg", "--config", cfg, "--out", a, "--threads", "1", "solve"}) == 0);
    REQUIRE(cli::run(std::vector<std::string>{"maxreg", "--config", cfg, "--out", b, "solve"}) == 0);
    CHECK(slurp(fs::path(a) / "solution.csv") == slurp(fs::path(b) / "solution.csv"));
    const auto j = read_report(a);
    CHECK(j["config"]["grid"]["m"] == "50");
    CHECK(j["config"]["solve"]["generator"] == "weierstrass");
}

TEST_CASE("small sweep and quasilinear runs") {
    const auto cfg = write_file("maxreg_small.ini",
                                "[sweep]\nalphas = [1.0]\nlevels = 2\nm0 = 16\nn0 = 8\n"
                                "[qlp]\nm = 20\nn = 7\nthreshold_scales = [0, 1, 2]\n");
    const auto out = (fs::temp_directory_path() / "maxreg_small").string();
    CHECK(cli::run(std::vector<std::string>{"maxreg", "--config", cfg, "--out", out, "sweep"}) == 0);
    CHECK(fs::exists(fs::path(out) / "sweep.csv"));
    CHECK(cli::run(std::vector<std::string>{"maxreg", "--config", cfg, "--out", out, "qlp"}) == 0);
    const auto j = read_report(out);
    CHECK(j["stages"]["qlp"]["converged"] == true);
    CHECK(fs::exists(fs::path(out) / "threshold.csv"));
}

}
