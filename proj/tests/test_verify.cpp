#include <doctest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

#include "rankgap/errors.hpp"
#include "rankgap/verify.hpp"
#include "support.hpp"

using namespace rankgap;

TEST_CASE("quick verification passes") {
    for (const ModelParams& p : {testing::sym(), testing::fig(), testing::skew()}) {
        const VerificationReport r = run_verification(p, VerifyLevel::quick, 0);
        CHECK(r.overall_pass);
        // five Monte Carlo checks are full-level only; the G + H moment needs lambda1 == lambda2
        CHECK(r.checks.size() == default_tolerances().size() - 5 - (p.symmetric ? 0 : 1));
        bool all = true;
        for (const auto& c : r.checks) {
            INFO(c.name << " residual " << c.residual << " tolerance " << c.tolerance << " " << c.note);
            CHECK(c.pass);
            CHECK(c.residual <= c.tolerance);
            CHECK(c.tolerance == default_tolerances().at(c.name));
            all = all && c.pass;
        }
        CHECK(r.overall_pass == all);
        CHECK(std::is_sorted(r.checks.begin(), r.checks.end(),
                             [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; }));
    }
}

TEST_CASE("deterministic checks are reproducible") {
    const ModelParams p = testing::fig();
    const auto a = run_verification(p, VerifyLevel::quick, 0);
    const auto b = run_verification(p, VerifyLevel::quick, 99);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].name == b.checks[i].name);
        CHECK(a.checks[i].residual == b.checks[i].residual);
    }
}

TEST_CASE("tolerance overrides") {
    const ModelParams p = testing::sym();
    const auto r = run_verification(p, VerifyLevel::quick, 0, {{"laplace.telescoping", 0.0}});
    CHECK(!r.overall_pass);
    for (const auto& c : r.checks)
        if (c.name == "laplace.telescoping") {
            CHECK(c.tolerance == 0.0);
            CHECK(c.pass == (c.residual <= 0.0));
        }
    CHECK_THROWS_AS(run_verification(p, VerifyLevel::quick, 0, {{"no.such.check", 1.0}}), UsageError);
    CHECK_THROWS_AS(params_from_lambdas(1.0, 0.0), ParameterError);
}

TEST_CASE("report serialization") {
    const ModelParams p = testing::fig();
    VerificationReport r;
    r.params = p;
    r.seed = 17;
    r.checks.push_back({"a.check", 1e-12, 1e-10, true, 25, 3, ""});
    r.checks.push_back({"b.check", std::numeric_limits<double>::infinity(), 1e-10, false, 0, 1, "exception: boom"});
    r.overall_pass = false;
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["params"]["lambda1"].get<double>() == p.lambda1);
    CHECK(j["level"] == "quick");
    CHECK(j["seed"] == 17);
    CHECK(j["overall_pass"] == false);
    REQUIRE(j["checks"].size() == 2);
    CHECK(j["checks"][0]["name"] == "a.check");
    CHECK(j["checks"][0]["residual"].get<double>() == 1e-12);
    CHECK(j["checks"][0]["grid_size"] == 25);
    CHECK(!j["checks"][0].contains("note"));
    CHECK(j["checks"][1]["residual"] == "inf");
    CHECK(j["checks"][1]["note"] == "exception: boom");
}

TEST_CASE("individual checks") {
    const ModelParams p = testing::skew();
    const auto& tol = default_tolerances();
    CHECK(checks::theta_modular().residual < tol.at("theta.modular"));
    CHECK(checks::product_vs_trig(p).residual < tol.at("laplace.product_vs_trig"));
    const auto m = checks::nu_method_triangle(p);
    CHECK(m.grid_size == 100);
    CHECK(m.residual < 1e-10);
    const Eigen::ArrayXXd cells = checks::pi_cell_probabilities(testing::sym(), 20, 4.0);
    CHECK(cells.minCoeff() >= 0.0);
    CHECK(cells.sum() < 1.0);
    CHECK(cells.sum() > 0.99);
}
