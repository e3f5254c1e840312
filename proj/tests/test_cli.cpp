#include "spdiv/commands.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace spdiv;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::filesystem::path scratch() {
    auto dir = std::filesystem::temp_directory_path() / "spdiv_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_config(const std::string& name, const std::string& text) {
    const auto path = scratch() / name;
    std::ofstream(path) << text;
    return path.string();
}

Run run(const std::string& command, CommandOptions opt) {
    std::ostringstream out, err;
    const int code = run_command(command, opt, out, err);
    return {code, out.str(), err.str()};
}

CommandOptions with_config(const std::string& path) {
    CommandOptions o;
    o.config_path = path;
    return o;
}

const char* kSinh = "[levy.bm]\nsigma = 1.4142135623730951\n[problem]\nphi = 2\nlambda = 0\ndelta = 1\n";

const char* kTwo = R"([levy.a]
drift_mu = -0.5
sigma = 1
[levy.b]
drift_mu = 0.2
sigma = 0.8
[chain]
states = a, b
switch_rates = 0, 0.5; 0.8, 0
discounts = 0.5, 0.6
[problem]
phi = 1.8
[solver]
grid_points = 300
)";

}  // namespace

TEST_CASE("solve-aux reports the classical barrier") {
    const Run r = run("solve-aux", with_config(write_config("sinh.ini", kSinh)));
    CHECK(r.code == kExitOk);
    const auto pos = r.out.find("barrier=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::abs(std::stod(r.out.substr(pos + 8)) - 1.316958) <= 1e-5);
    CHECK(r.out.find("smooth_fit_barrier=") != std::string::npos);
}

TEST_CASE("config errors exit 2") {
    Run r = run("solve-aux", with_config(write_config("nophi.ini", "[levy.bm]\nsigma = 1\n[problem]\ndelta = 1\n")));
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("problem.phi: required") != std::string::npos);

    r = run("solve-aux", with_config(write_config("lowphi.ini", "[levy.bm]\nsigma = 1\n[problem]\nphi = 0.5\ndelta = 1\n")));
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("phi must exceed 1") != std::string::npos);

    r = run("solve-aux", with_config((scratch() / "missing.ini").string()));
    CHECK(r.code == kExitConfig);

    r = run("frobnicate", with_config(write_config("sinh.ini", kSinh)));
    CHECK(r.code == kExitConfig);
}

TEST_CASE("solver failures exit 3") {
    std::string text = kTwo;
    text += "max_iter = 2\n";
    const Run r = run("solve-regime", with_config(write_config("short.ini", text)));
    CHECK(r.code == kExitSolver);
    CHECK(r.err.find("no convergence") != std::string::npos);
    CHECK(r.err.find("decay ratio") != std::string::npos);
}

TEST_CASE("solve-regime writes a summary that simulate can read") {
    const auto out = scratch() / "regime_out";
    std::filesystem::remove_all(out);
    CommandOptions o = with_config(write_config("two.ini", kTwo));
    o.out_dir = out.string();
    const Run r = run("solve-regime", o);
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("barrier.a=") != std::string::npos);
    CHECK(r.out.find("trace=") != std::string::npos);
    CHECK(std::filesystem::exists(out / "summary.txt"));
    CHECK(std::filesystem::exists(out / "value_a.csv"));
    CHECK(std::filesystem::exists(out / "regime_trace.csv"));

    CommandOptions s = with_config(o.config_path);
    s.from_summary = (out / "summary.txt").string();
    s.paths = 400;
    s.seed = 3;
    s.state = "b";
    const Run a = run("simulate", s);
    const Run b = run("simulate", s);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("state,x0,barrier,mean,std_error,n_effective,analytic\n", 0) == 0);
    CHECK(a.out.find("\nb,") != std::string::npos);

    s.state = "zzz";
    CHECK(run("simulate", s).code == kExitConfig);
    s.state.reset();
    s.barriers = std::vector<double>{1.0};
    CHECK(run("simulate", s).code == kExitConfig);
}

TEST_CASE("verify on the sinh model passes every check") {
    CommandOptions o = with_config(write_config("sinh.ini", kSinh));
    o.paths = 20000;
    o.seed = 1;
    const Run r = run("verify", o);
    CHECK(r.code == kExitOk);
    for (const char* name : {"laplace_transform", "exit_identities", "smooth_fit", "hjb_inside", "hjb_above", "dominance"})
        CHECK(r.out.find(std::string("PASS check=") + name + " model=bm") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("curve writes a CSV with a header") {
    CommandOptions o = with_config(write_config("sinh.ini", kSinh));
    o.points = 5;
    const Run r = run("curve", o);
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("x,W,Z,Zbar,value\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
}

TEST_CASE("number lists") {
    CHECK(parse_number_list("1.5, 2") == std::vector<double>{1.5, 2.0});
    CHECK_THROWS(parse_number_list("1.5, x"));
    CHECK_THROWS(parse_number_list(""));
}
