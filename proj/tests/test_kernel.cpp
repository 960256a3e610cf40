#include <doctest.h>

#include <random>

#include "rankgap/errors.hpp"
#include "rankgap/kernel.hpp"
#include "support.hpp"

using namespace rankgap;
using testing::rel;

TEST_CASE("kernel values") {
    const ModelParams p = testing::sym();
    CHECK(kernel_K(Complex(0.0), Complex(0.0), p) == Complex(0.0));
    CHECK(kernel_K(Complex(1.0), Complex(1.0), p) == Complex(2.0));
    CHECK(kernel_Kstar(10.0, 6.0, p) == 0.0);
    CHECK(kernel_Kstar(1.0, 0.0, p) == 0.0);
    CHECK(kernel_Kstar(6.0, 10.0, p) == 0.0);
}

TEST_CASE("branch functions are roots of the kernel") {
    for (const ModelParams& p : {testing::sym(), testing::fig(), testing::skew()}) {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> d(-4.0, 4.0);
        for (int i = 0; i < 200; ++i) {
            const Complex z(d(rng), i % 3 == 0 ? 0.0 : d(rng));
            for (Branch b : {Branch::plus, Branch::minus}) {
                const Complex y = branch_A2(z, b, p);
                const double s2 = std::norm(z - y) + p.lambda1 * std::abs(z) + p.lambda2 * std::abs(y);
                CHECK(std::abs(kernel_K(z, y, p)) <= 1e-12 * s2);
                const Complex x = branch_A1(z, b, p);
                const double s1 = std::norm(x - z) + p.lambda1 * std::abs(x) + p.lambda2 * std::abs(z);
                CHECK(std::abs(kernel_K(x, z, p)) <= 1e-12 * s1);
            }
        }
    }
}

TEST_CASE("branch function special values") {
    const ModelParams p = testing::skew();
    CHECK(std::abs(branch_A2(0.0, Branch::plus, p)) < 1e-15);
    CHECK(std::abs(branch_A2(0.0, Branch::minus, p) + p.lambda2) < 1e-15);

    const ModelParams s = testing::sym();
    const BranchPoints bp = branch_points(s);
    CHECK(bp.y_plus == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(bp.x_plus == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(std::abs(branch_A1(0.125, Branch::plus, s) - Complex(-0.375)) < 1e-15);
    CHECK(std::abs(branch_A1(0.125, Branch::minus, s) - Complex(-0.375)) < 1e-15);

    const BranchPoints q = branch_points(p);
    CHECK(q.x_plus == doctest::Approx(1.7 * 1.7 / 8.0).epsilon(1e-14));
    CHECK(q.y_plus == doctest::Approx(0.09 / 8.0).epsilon(1e-14));
    for (double x : {q.x_plus + 0.01, q.x_plus + 1.0, q.x_plus + 30.0}) {
        const Complex a = branch_A2(x, Branch::plus, p), b = branch_A2(x, Branch::minus, p);
        CHECK(std::abs(a - std::conj(b)) <= 1e-14 * std::abs(a));
        CHECK(a.imag() > 0.0);
    }
}

TEST_CASE("parabola points") {
    const ModelParams p = testing::sym();
    const double xp = branch_points(p).x_plus;
    const Complex v = parabola_P2_point(xp, p);
    CHECK(v.imag() == 0.0);
    CHECK(v.real() == doctest::Approx(-p.lambda2 / 2 + xp).epsilon(1e-14));
    const Complex y = parabola_P2_point(1.0, p);
    CHECK(std::abs(y.imag() * y.imag() - 2.0 * y.real() - 0.75) < 1e-12);
    CHECK(std::abs(parabola_P2_excess(y, p)) < 1e-12);
    CHECK(std::abs(parabola_P2_excess(std::conj(y), p)) < 1e-12);
    CHECK_THROWS_AS(parabola_P2_point(xp - 1e-3, p), DomainError);

    const ModelParams q = testing::skew();
    for (double t : {0.0, 0.5, 3.0, 40.0}) {
        const Complex z = parabola_P2_point(branch_points(q).x_plus + t, q);
        CHECK(std::abs(parabola_P2_excess(z, q)) <= 1e-12 * (1.0 + std::norm(z)));
        CHECK(classify_D2(z, q) == Region::boundary);
    }
    CHECK(classify_D2(Complex(1.0, 0.0), q) == Region::inside);
    CHECK(classify_D2(Complex(-5.0, 0.0), q) == Region::outside);
    CHECK(classify_D2(Complex(0.0, 10.0), q) == Region::outside);
}

TEST_CASE("conformal gluing map") {
    const ModelParams p = testing::sym();
    CHECK(std::abs(conformal_W(branch_points(p).y_plus, p) - 1.0) < 1e-15);
    CHECK(std::abs(conformal_W(0.0, p) - 0.5) < 1e-15);

    for (const ModelParams& q : {testing::sym(), testing::fig(), testing::skew()}) {
        const double xp = branch_points(q).x_plus;
        for (int i = 0; i < 200; ++i) {
            const double x = xp + 10.0 * i / 199.0;
            const Complex a = conformal_W(branch_A2(x, Branch::plus, q), q);
            const Complex b = conformal_W(branch_A2(x, Branch::minus, q), q);
            const double s = 1.0 + std::abs(a);
            CHECK(std::abs(a - b) <= 1e-12 * s);
            CHECK(std::abs(a.imag()) <= 1e-12 * s);
            CHECK(a.real() <= 1e-12 * s);
        }
    }
}

TEST_CASE("conformal inverse on the slit plane") {
    const ModelParams p = testing::fig();
    for (double re : {-3.0, -0.5, 0.2, 1.0, 7.0})
        for (double im : {-2.0, -0.1, 0.3, 4.0}) {
            const Complex z(re, im);
            CHECK(rel(conformal_W(conformal_W_inv(z, p), p), z) < 1e-10);
        }
    for (double re : {0.3, 2.0, 9.0}) CHECK(rel(conformal_W(conformal_W_inv(re, p), p), Complex(re)) < 1e-10);
    CHECK_THROWS_AS(conformal_W_inv(Complex(-1.0, 0.0), p), DomainError);
    CHECK_THROWS_AS(conformal_W_inv(Complex(0.0, 0.0), p), DomainError);

    for (double re : {0.0, 0.4, 1.5})
        for (double im : {-0.4, 0.1, 0.45}) {
            const Complex y(re, im);
            REQUIRE(classify_D2(y, p) == Region::inside);
            CHECK(std::abs(conformal_W_inv(conformal_W(y, p), p) - y) < 1e-10 * (1.0 + std::abs(y)));
        }
}

TEST_CASE("decoupling identity") {
    const ModelParams p = testing::skew();
    CHECK(decoupling_residual(0.0, 0.0, p) == Complex(0.0));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Complex x(d(rng), d(rng)), y(d(rng), d(rng));
        const Complex lhs = (x - y / 2.0) * decoupling_D1(y, p) - (y - x / 2.0) * decoupling_D2(x, p);
        CHECK(std::abs(decoupling_residual(x, y, p)) <= 1e-10 * (1.0 + std::abs(lhs)));
    }
    const double xp = branch_points(p).x_plus;
    for (double x : {xp + 0.1, xp + 1.0, xp + 5.0}) {
        const Complex y = branch_A2(x, Branch::plus, p);
        CHECK(rel((2.0 * x - y) / (2.0 * y - x), decoupling_D2(Complex(x), p) / decoupling_D1(y, p)) < 1e-10);
    }
}

TEST_CASE("boundary ratio on the parabola") {
    for (const ModelParams& p : {testing::sym(), testing::fig(), testing::skew()}) {
        const double xp = branch_points(p).x_plus;
        CHECK(std::abs(boundary_ratio_G(parabola_P2_point(xp, p), p) - 1.0) < 1e-12);
        for (double t : {0.05, 0.7, 2.0, 9.0}) {
            const Complex y = parabola_P2_point(xp + t * p.lambda_sum, p);
            const Complex g = boundary_ratio_G(y, p);
            CHECK(rel(g, decoupling_D1(std::conj(y), p) / decoupling_D1(y, p)) < 1e-10);
            CHECK(std::abs(std::abs(g) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("boundary ratio pole is reported with its location") {
    const ModelParams p = testing::sym();
    // A1+(0) = 0, so both factors are 0/0
    try {
        boundary_ratio_G(Complex(0.0, 0.0), p);
        FAIL("expected a singularity");
    } catch (const SingularityError& e) {
        CHECK(std::abs(e.location) < 1e-12);
    }
}

TEST_CASE("even cosine helper") {
    CHECK(cos_pi_sqrt(0.0) == 1.0);
    CHECK(cos_pi_sqrt(0.25) == doctest::Approx(std::cos(M_PI / 2)).epsilon(1e-15));
    CHECK(cos_pi_sqrt(-4.0) == doctest::Approx(std::cosh(2 * M_PI)).epsilon(1e-15));
    CHECK(cos_pi_sqrt(1e-10) == doctest::Approx(1.0 - M_PI * M_PI * 1e-10 / 2).epsilon(1e-15));
    CHECK(cos_pi_sqrt(Complex(-4.0, 0.0)).imag() == 0.0);
    const Complex w(0.3, 0.7);
    CHECK(rel(cos_pi_sqrt(w), std::cos(M_PI * std::sqrt(w))) < 1e-14);
    CHECK(rel(cos_pi_sqrt(Complex(1e-10, 1e-10)), std::cos(M_PI * std::sqrt(Complex(1e-10, 1e-10)))) < 1e-14);
}

TEST_CASE("cosine difference keeps its digits for small increments") {
    for (double mu : {0.1, 0.5, 0.9})
        for (double d : {1e-12, -1e-9, 1e-5, 0.3, -0.2, 3.0, -5.0}) {
            const long double ref = (mu * mu + d >= 0)
                                        ? std::cos(3.14159265358979323846264L * std::sqrt((long double)mu * mu + d)) -
                                              std::cos(3.14159265358979323846264L * mu)
                                        : std::cosh(3.14159265358979323846264L * std::sqrt(-((long double)mu * mu + d))) -
                                              std::cos(3.14159265358979323846264L * mu);
            const double tol = std::abs(d) < 1e-4 ? 1e-6 : 1e-13;
            CHECK(rel(cos_pi_sqrt_diff(mu, d), double(ref)) < tol);
        }
    // first order: -pi sin(pi mu) d/(2 mu)
    const double mu = 0.3, d = 1e-12;
    CHECK(rel(cos_pi_sqrt_diff(mu, d), -M_PI * std::sin(M_PI * mu) * d / (2 * mu)) < 1e-10);
}
