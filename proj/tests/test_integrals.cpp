#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rankgap/density.hpp"
#include "rankgap/integrals.hpp"
#include "rankgap/laplace.hpp"
#include "support.hpp"

using namespace rankgap;
using testing::rel;

TEST_CASE("total mass of pi") {
    for (const ModelParams& p : {testing::sym(), testing::fig(), testing::skew(), params_from_lambdas(4.0, 0.5)}) {
        const IntegralValue m = pi_mass(p);
        CHECK(std::abs(m.value - 1) < 1e-10);
        CHECK(m.error_bound < 1e-10);
        CHECK(m.terms_used > 0);
    }
}

TEST_CASE("moments of the boundary measures") {
    for (const ModelParams& p : {testing::sym(), testing::fig(), testing::skew()})
        for (int side : {1, 2}) {
            const IntegralValue m0 = nu_moment(side, p, 0);
            CHECK(std::abs(m0.value - nu_mass(side, p)) < 1e-8);
            const IntegralValue m1 = nu_moment(side, p, 1);
            CHECK(rel(m1.value / m0.value, nu_mean(side, p)) < 1e-8);
            // exponential moments are the transform at negative argument
            for (double s : {0.3 * p.lambda1, -1.0}) {
                const IntegralValue e = nu_moment(side, p, 0, s);
                CHECK(rel(e.value, nu_hat(side, -s, p).value.real()) < 1e-8);
            }
        }
}

TEST_CASE("moments of G + H in the symmetric case") {
    for (double lam : {1.0, 2.0}) {
        const ModelParams p = params_from_lambdas(lam, lam);
        CHECK(std::abs(nu_moment(1, p, 0).value / (2 * lam) - 1) < 1e-8);
        CHECK(std::abs(nu_moment(1, p, 1).value / (2 * lam) - 2 / (3 * lam)) < 1e-8);
        CHECK(std::abs(nu_moment(1, p, 0, lam).value / (2 * lam) - 2) < 1e-6);
    }
}

TEST_CASE("corner bounds") {
    for (const ModelParams& p : {testing::sym(), testing::fig(), testing::skew()}) {
        const double delta = corner_scaled_cut / p.lambda_sum;
        for (int side : {1, 2}) {
            const double bound = nu_corner_bound(side, p, delta);
            const double exact = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                [&](double u) { return u <= 0 ? 0.0 : nu_density(side, u, p, NuMethod::theta_operator, 1e-300).value; },
                0.0, delta);
            CHECK(bound >= exact);
            CHECK(bound < 1e-12);
        }
        CHECK(pi_corner_bound(p, delta) < 1e-12);
        CHECK(pi_corner_bound(p, 2 * delta) >= pi_corner_bound(p, delta));
    }
}
