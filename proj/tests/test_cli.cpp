#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rankgap/cli.hpp"
#include "rankgap/density.hpp"
#include "support.hpp"

using namespace rankgap;
using rankgap::cli::cmd_dispatch;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rankgap");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cmd_dispatch(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) v.push_back(f);
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

struct CommaDecimal : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
};

}  // namespace

TEST_CASE("format_double") {
    CHECK(cli::format_double(0.1) == "0.1");
    CHECK(cli::format_double(1e-300) == "1e-300");
    CHECK(cli::format_double(std::nan("")) == "nan");
    CHECK(cli::format_double(-HUGE_VAL) == "-inf");
    const double x = 0.1234567890123456789;
    CHECK(std::stod(cli::format_double(x)) == x);
}

TEST_CASE("grid specs") {
    const auto pts = cli::GridSpec{0.0, 1.0, 5}.points();
    CHECK(pts == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS(cli::GridSpec{0.0, 1.0, 1}.points());
}

TEST_CASE("boundary subcommand writes the requested grid") {
    const auto path = std::filesystem::temp_directory_path() / "rankgap_boundary_test.csv";
    const Run r = run({"boundary", "--lambda1", "1", "--lambda2", "1", "--u-max", "2", "--steps", "200", "--out",
                       path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto ls = lines(slurp(path));
    std::filesystem::remove(path);
    REQUIRE(ls.size() == 202);
    CHECK(ls[0].rfind("# rankgap boundary --lambda1 1 --lambda2 1", 0) == 0);
    CHECK(ls[1] == "u,nu1,nu2");
    const auto first = fields(ls[2]);
    REQUIRE(first.size() == 3);
    CHECK(std::stod(first[0]) == doctest::Approx(0.01));
    const ModelParams p = testing::sym();
    CHECK(std::stod(first[1]) == doctest::Approx(nu_density(1, 0.01, p, NuMethod::theta_operator, 1e-10).value));
    CHECK(fields(ls.back())[0] == "2");
    // the first rows approach nu1(0+) = 0 continuously
    double prev = 0.0;
    for (int i = 2; i < 12; ++i) {
        const double v = std::stod(fields(ls[i])[1]);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("config line reproduces the run") {
    const Run a = run({"boundary", "--lambda1", "0.3", "--lambda2", "1.7", "--u-max", "1", "--steps", "7",
                       "--method", "bi-infinite"});
    REQUIRE(a.code == 0);
    const auto ls = lines(a.out);
    std::istringstream is(ls[0].substr(10));  // drop "# rankgap "
    std::vector<std::string> args;
    for (std::string t; is >> t;) args.push_back(t);
    const Run b = run(args);
    REQUIRE(b.code == 0);
    CHECK(b.out == a.out);
}

TEST_CASE("density subcommand") {
    const Run r = run({"density", "--lambda1", "1", "--lambda2", "1", "--u-max", "2", "--v-max", "2", "--steps", "9"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2 + 81);
    CHECK(ls[1] == "u,v,pi,tail_bound");
    CHECK(fields(ls[2])[2] == "nan");
    CHECK(r.err.find("nan") != std::string::npos);
    // row order: u major, v minor
    CHECK(fields(ls[3])[0] == "0");
    CHECK(fields(ls[3])[1] == "0.25");
    const auto f = fields(ls[2 + 4 * 9 + 4]);
    CHECK(std::stod(f[0]) == 1.0);
    CHECK(std::stod(f[1]) == 1.0);
    CHECK(std::stod(f[2]) == doctest::Approx(9.4412898556975031989e-5).epsilon(1e-9));
}

TEST_CASE("laplace, theta, simulate and convolve subcommands") {
    const Run l = run({"laplace", "--lambda1", "1", "--lambda2", "1", "--x-max", "1", "--y-max", "1", "--steps", "2"});
    REQUIRE(l.code == 0);
    const auto ll = lines(l.out);
    REQUIRE(ll.size() == 6);
    CHECK(fields(ll[2])[2] == "1");
    CHECK(std::stod(fields(ll[5])[4]) == doctest::Approx(1.0500299483444745352).epsilon(1e-12));

    const Run t = run({"theta", "--u-min", "1", "--u-max", "7", "--steps", "2", "--mu", "0.5", "0.8"});
    REQUIRE(t.code == 0);
    const auto tl = lines(t.out);
    REQUIRE(tl.size() == 6);
    CHECK(tl[1] == "u,mu,theta,theta_prime,regime,tail_bound");
    CHECK(fields(tl[5])[4] == "direct");
    CHECK(fields(tl[2])[4] == "transformed");

    const Run s = run({"simulate", "--lambda1", "1", "--lambda2", "1", "--seed", "3", "--samples", "500", "--burn-in",
                       "1", "--chains", "2"});
    REQUIRE(s.code == 0);
    const auto sl = lines(s.out);
    CHECK(sl[1] == "g,h");
    CHECK(sl.size() == 502);
    CHECK(run({"simulate", "--lambda1", "1", "--lambda2", "1", "--seed", "3", "--samples", "500", "--burn-in", "1",
               "--chains", "2"})
              .out == s.out);
    const Run h = run({"simulate", "--lambda1", "1", "--lambda2", "1", "--seed", "3", "--t-total", "20", "--burn-in",
                       "1", "--histogram-bins", "4"});
    REQUIRE(h.code == 0);
    const auto hl = lines(h.out);
    CHECK(hl[1] == "u_lo,u_hi,v_lo,v_hi,count");
    CHECK(hl.size() == 2 + 16);

    const Run c = run({"convolve", "--lambda1", "0.166667", "--lambda2", "0.833333", "--case", "nu", "--side", "2",
                       "--samples", "100", "--k-max", "60", "--seed", "1"});
    REQUIRE(c.code == 0);
    CHECK(lines(c.out).size() == 103);
}

TEST_CASE("verify subcommand") {
    const Run r = run({"verify", "--lambda1", "0.166667", "--lambda2", "0.833333", "--level", "quick"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["overall_pass"] == true);
    CHECK(j["level"] == "quick");
    const Run f = run({"verify", "--lambda1", "1", "--lambda2", "1", "--tol-override", "laplace.telescoping=1e-300"});
    CHECK(f.code == 2);
    CHECK(nlohmann::json::parse(f.out)["overall_pass"] == false);
}

TEST_CASE("exit codes") {
    CHECK(run({"boundary", "--lambda1", "1", "--lambda2", "0"}).code == 1);
    CHECK(run({"boundary", "--lambda1", "1", "--lambda2", "1", "--delta1", "0", "--delta2", "1", "--delta3", "2"}).code ==
          1);
    CHECK(run({"boundary"}).code == 1);
    CHECK(run({"boundary", "--lambda1", "1"}).code == 1);
    CHECK(run({"simulate", "--lambda1", "1", "--lambda2", "1", "--samples", "10"}).code == 1);
    CHECK(run({"verify", "--lambda1", "1", "--lambda2", "1", "--level", "full"}).code == 1);
    CHECK(run({"verify", "--lambda1", "1", "--lambda2", "1", "--tol-override", "nope=1"}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"boundary", "--lambda1", "1", "--lambda2", "1", "--frobnicate"}).code == 1);
    CHECK(run({"boundary", "--lambda1", "1", "--lambda2", "1", "--method", "symmetric"}).code == 0);
    CHECK(run({"boundary", "--lambda1", "1", "--lambda2", "2", "--method", "symmetric"}).code == 1);
    CHECK(run({"theta", "--mu", "1.5"}).code == 1);
    const Run w = run({"boundary", "--lambda1", "1", "--lambda2", "1", "--out", "/nonexistent/dir/x.csv"});
    CHECK(w.code == 3);
    CHECK(!w.err.empty());
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("deltas are accepted and echoed") {
    const Run r = run({"boundary", "--delta1", "0", "--delta2", "0.5", "--delta3", "1", "--steps", "3"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out)[0].find("--delta1 0 --delta2 0.5 --delta3 1") != std::string::npos);
    const Run s = run({"boundary", "--lambda1", "1", "--lambda2", "1", "--steps", "3"});
    CHECK(lines(r.out)[2] == lines(s.out)[2]);
}

TEST_CASE("output ignores the global locale") {
    const std::locale old = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
    const Run r = run({"boundary", "--lambda1", "1", "--lambda2", "1", "--u-max", "0.5", "--steps", "4"});
    std::locale::global(old);
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    for (std::size_t i = 2; i < ls.size(); ++i) CHECK(fields(ls[i]).size() == 3);
    CHECK(fields(ls[2])[0] == "0.125");
}
