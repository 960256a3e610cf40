#include "rankgap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <nlohmann/json.hpp>

#include "rankgap/density.hpp"
#include "rankgap/errors.hpp"
#include "rankgap/integrals.hpp"
#include "rankgap/kernel.hpp"
#include "rankgap/laplace.hpp"
#include "rankgap/precision.hpp"
#include "rankgap/stochastic.hpp"
#include "rankgap/theta.hpp"
#include "rankgap/theta_series.hpp"

namespace rankgap {

using std::numbers::pi;

namespace checks {

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, n == 1 ? 0.0 : double(i) / (n - 1));
    return v;
}

// 50 points of P2 = A2(+/-)([x+, inf)), by the + branch.
std::vector<Complex> parabola_points(const ModelParams& p, int n) {
    const double xp = branch_points(p).x_plus;
    std::vector<Complex> out;
    for (double t : linspace(0.05, 10.0, n)) out.push_back(parabola_P2_point(xp + t * p.lambda_sum, p));
    return out;
}

}  // namespace

Measured branch_roots(const ModelParams& p) {
    double worst = 0.0;
    int n = 0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Complex z(d(rng) * p.lambda_sum, i % 4 == 0 ? 0.0 : d(rng) * p.lambda_sum);
        for (Branch b : {Branch::plus, Branch::minus}) {
            const Complex y = branch_A2(z, b, p);
            const double s2 = std::norm(z - y) + p.lambda1 * std::abs(z) + p.lambda2 * std::abs(y);
            worst = std::max(worst, std::abs(kernel_K(z, y, p)) / std::max(s2, 1e-300));
            const Complex x = branch_A1(z, b, p);
            const double s1 = std::norm(x - z) + p.lambda1 * std::abs(x) + p.lambda2 * std::abs(z);
            worst = std::max(worst, std::abs(kernel_K(x, z, p)) / std::max(s1, 1e-300));
            n += 2;
        }
    }
    return {worst, n, ""};
}

Measured decoupling_identity(const ModelParams& p) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Complex x(d(rng), d(rng)), y(d(rng), d(rng));
        const Complex lhs = (x - y / 2.0) * decoupling_D1(y, p) - (y - x / 2.0) * decoupling_D2(x, p);
        worst = std::max(worst, std::abs(decoupling_residual(x, y, p)) / (1.0 + std::abs(lhs)));
    }
    return {worst, 100, ""};
}

Measured gluing(const ModelParams& p) {
    const double xp = branch_points(p).x_plus;
    double worst = 0.0;
    for (double x : linspace(xp, xp + 10.0, 200)) {
        const Complex wp = conformal_W(branch_A2(x, Branch::plus, p), p);
        const Complex wm = conformal_W(branch_A2(x, Branch::minus, p), p);
        const double s = 1.0 + std::abs(wp);
        worst = std::max({worst, std::abs(wp - wm) / s, std::abs(wp.imag()) / s, std::max(wp.real(), 0.0) / s});
    }
    return {worst, 200, ""};
}

Measured conformal_inverse(const ModelParams& p) {
    double worst = 0.0;
    int n = 0;
    const double L = p.lambda_sum;
    for (double re : linspace(-0.4, 4.0, 12))
        for (double im : linspace(-3.0, 3.0, 13)) {
            const Complex y(re * L, im * L);
            if (classify_D2(y, p) != Region::inside) continue;
            const Complex w = conformal_W(y, p);
            if (w.imag() == 0.0 && w.real() <= 0.0) continue;
            worst = std::max(worst, std::abs(conformal_W_inv(w, p) - y) / (1.0 + std::abs(y)));
            worst = std::max(worst, rel(conformal_W(conformal_W_inv(w, p), p), w));
            ++n;
        }
    return {worst, n, ""};
}

Measured boundary_ratio(const ModelParams& p) {
    double worst = 0.0;
    const auto pts = parabola_points(p, 50);
    for (const Complex& y : pts) {
        const Complex g = boundary_ratio_G(y, p);
        worst = std::max({worst, rel(g, decoupling_D1(std::conj(y), p) / decoupling_D1(y, p)),
                          std::abs(std::abs(g) - 1.0)});
    }
    return {worst, int(pts.size()), ""};
}

Measured carleman(const ModelParams& p) {
    double worst = 0.0;
    const auto pts = parabola_points(p, 50);
    for (const Complex& y : pts) {
        const Complex a = nu1_hat(y, p).value;
        const Complex b = nu1_hat(std::conj(y), p).value;
        worst = std::max(worst, std::abs(b - boundary_ratio_G(y, p) * a) / (1.0 + std::abs(a)));
    }
    return {worst, int(pts.size()), ""};
}

Measured continuation(const ModelParams& p) {
    double worst = 0.0;
    std::vector<double> ys = linspace(-0.9 * p.lambda2, -0.1 * p.lambda2, 25);
    const double start = std::max(branch_points(p).y_plus, p.lambda1 / 2.0) + 0.5 * p.lambda_sum;
    for (double y : linspace(start, 10.0 * p.lambda_sum, 25)) ys.push_back(y);
    for (double y : ys) {
        const Complex a = branch_A1(y, Branch::plus, p);
        const Complex rhs = -((2.0 * y - a) / (2.0 * a - y)) * nu2_hat(a, p).value;
        const Complex lhs = nu1_hat(y, p).value;
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    return {worst, int(ys.size()), ""};
}

Measured invariance(const ModelParams& p) {
    double worst = 0.0;
    const auto pts = parabola_points(p, 50);
    for (const Complex& y : pts) {
        const Complex yc = std::conj(y);
        const Complex a = nu1_hat(y, p).value / decoupling_D1(y, p);
        const Complex b = nu1_hat(yc, p).value / decoupling_D1(yc, p);
        worst = std::max(worst, std::abs(a - b) / (1e-300 + std::abs(a)));
    }
    return {worst, int(pts.size()), ""};
}

Measured transform_homogeneity(const ModelParams& p) {
    const ModelParams q = p.normalized();
    const double L = p.lambda_sum;
    const std::vector<double> g{0.0, 0.5, 1.25, 3.0};
    double worst = 0.0;
    for (double x : g)
        for (double y : g) {
            worst = std::max(worst, rel(pi_hat(L * x, L * y, p).value, pi_hat(x, y, q).value));
        }
    for (double y : g) worst = std::max(worst, rel(nu1_hat(L * y, p).value, L * nu1_hat(y, q).value));
    std::string note;
    if (p.symmetric) {
        const ModelParams one = params_from_lambdas(1.0, 1.0);
        const double lam = p.lambda1;
        double s = 0.0;
        for (double y : g) s = std::max(s, rel(nu1_hat(lam * y, p).value, lam * nu1_hat(y, one).value));
        worst = std::max(worst, s);
        note = "includes the symmetric relation";
    }
    return {worst, 20, note};
}

Measured product_vs_trig(const ModelParams& p) {
    double worst = 0.0;
    for (double y : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        const double a = nu1_hat_product(y, p, 10000).value.real();
        const double b = nu1_hat(y, p).value.real();
        worst = std::max(worst, std::abs(a / b - 1.0));
    }
    return {worst, 5, "n_factors = 10^4"};
}

Measured telescoping(const ModelParams& p) {
    const double expect = 2.0 * (1.0 + p.mu1) / (1.0 + p.mu2);
    const double prod = nu2_hat_product(-p.lambda1, p, 10000).value.real() / nu_mass(2, p);
    const double closed = nu2_hat(-p.lambda1, p).value.real() / nu_mass(2, p);
    return {std::max(rel(prod, expect), rel(closed, expect)), 2, ""};
}

Measured diagonal_transform(const ModelParams& p) {
    double worst = 0.0;
    for (double y : {0.5, 1.0, 2.0}) {
        const Complex n1 = nu1_hat(y, p).value;
        worst = std::max(worst, rel(pi_hat(2.0 * y, y, p).value, 1.5 * n1 / (y + 2.0 * p.lambda1 + p.lambda2)));
        if (p.symmetric) worst = std::max(worst, rel(pi_hat(y, y, p).value, n1 / (2.0 * p.lambda1)));
    }
    return {worst, 3, ""};
}

namespace {

template <class Real>
void modular_pair(double u, double mu, Real& direct, Real& transformed) {
    const theta_detail::Weights w{1.0, 0.0, 0.0, 0.0};
    const double tol = 1e-45 * std::exp(-pi * pi / u);
    direct = theta_detail::direct_sum<Real>(Real(u), Real(mu), w, Real(1), tol).value;
    transformed = theta_detail::transformed_sum<Real>(Real(u), Real(mu), w, Real(1), tol).value;
}

// High-precision reference pair; digits grow with the cancellation in the
// direct series, ~ pi^2/(u ln 10).
std::pair<double, double> modular_reference(double u, double mu, double& value) {
    const double lost = pi * pi / (u * std::log(10.0));
    auto finish = [&](const auto& d, const auto& t) {
        value = static_cast<double>(t);
        return std::pair<double, double>{static_cast<double>(d), static_cast<double>(abs((d - t) / t))};
    };
    if (lost < 20) {
        precision::mpfr_real<50> d, t;
        modular_pair(u, mu, d, t);
        return finish(d, t);
    }
    if (lost < 60) {
        precision::mpfr_real<100> d, t;
        modular_pair(u, mu, d, t);
        return finish(d, t);
    }
    precision::mpfr_real<150> d, t;
    modular_pair(u, mu, d, t);
    return finish(d, t);
}

}  // namespace

Measured theta_modular() {
    double worst = 0.0;
    int n = 0;
    for (double u : logspace(0.05, 50.0, 60))
        for (int k = 1; k <= 9; ++k) {
            double value = 0.0;
            worst = std::max(worst, modular_reference(u, k / 10.0, value).second);
            ++n;
        }
    return {worst, n, "both series in extended precision"};
}

Measured theta_double_accuracy() {
    double worst = 0.0;
    int n = 0;
    for (double u : logspace(0.05, 50.0, 60))
        for (int k = 1; k <= 9; ++k) {
            double value = 0.0;
            modular_reference(u, k / 10.0, value);
            const SeriesValue s = theta_mu(u, k / 10.0, 1e-17 * std::abs(value));
            worst = std::max(worst, rel(s.value, value));
            ++n;
        }
    return {worst, n, ""};
}

Measured theta_ramanujan() {
    double worst = 0.0;
    int n = 0;
    for (double u : {0.5, 1.0, 2.0, 5.0})
        for (double mu : {0.25, 0.5, 0.75}) {
            worst = std::max(worst, ramanujan_relation_residual(u, mu, 1e-15));
            ++n;
        }
    return {worst, n, ""};
}

Measured theta_entrance_identity() {
    double worst = 0.0;
    int n = 0;
    for (double t : {0.5, 1.0, 3.0})
        for (double mu : {0.3, 0.5, 0.7}) {
            const double lhs = theta_mu(2.0 / t, mu, 1e-20).value;
            const double q = entrance_density(t, mu, 1e-18).value;
            const double rhs = std::pow(pi * t / 2.0, 1.5) * std::exp(mu * mu / (2.0 * t) - pi * pi * t / 2.0) * q /
                               std::sin(pi * mu);
            worst = std::max(worst, rel(rhs, lhs));
            ++n;
        }
    return {worst, n, ""};
}

Measured theta_laplace_quadrature(const ModelParams& p) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double worst = 0.0;
    for (double x : {0.5, 1.0, 5.0}) {
        auto f = [&](double u) {
            if (u <= 0.0) return 0.0;
            return theta_mu(p.lambda_sum * u, p.mu1, 1e-18).value * std::exp(-x * u);
        };
        const double q = integrator.integrate(f, 1e-13);
        worst = std::max(worst, rel(q, theta_laplace_closed(x, p)));
    }
    return {worst, 3, "exp-sinh quadrature"};
}

Measured compensation_roots(const ModelParams& p) {
    const auto t = compensation_tables(p, 50);
    double worst = 0.0;
    for (int n = 0; n <= 50; ++n) {
        for (auto [a, b] : {std::pair{t.a(n), t.b(n)}, std::pair{t.ap(n), t.bp(n)}}) {
            const double s = (a - b) * (a - b) + p.lambda1 * a + p.lambda2 * b;
            worst = std::max(worst, std::abs(kernel_Kstar(a, b, p)) / s);
        }
    }
    return {worst, 102, ""};
}

Measured compensation_recursion(const ModelParams& p) {
    const auto t = compensation_tables(p, 50);
    Eigen::ArrayXd c, cp;
    compensation_c_recursive(p, 50, c, cp);
    const double e = std::max(((c - t.c) / t.c).abs().maxCoeff(), ((cp - t.cp) / t.cp).abs().maxCoeff());
    return {e, 102, ""};
}

Measured grouped_coefficients(const ModelParams& p) {
    const auto t = compensation_tables(p, 62);
    const auto terms = nu_series_terms(2, p, 40);
    auto weight_at = [&](double rate) {
        for (const auto& e : terms)
            if (std::abs(e.rate - rate) <= 1e-9 * rate) return e.weight;
        return std::nan("");
    };
    double worst = 0.0;
    for (int n = 0; n < 30; ++n) {
        const double pair = t.c(2 * n) + t.c(2 * n + 1);
        worst = std::max(worst, rel(pair, compensation_pair_closed(p, n)));
        worst = std::max(worst, rel(t.C * pair, weight_at(t.a(2 * n))));
        const double prime = n == 0 ? t.Cp * t.cp(0) : t.Cp * (t.cp(2 * n - 1) + t.cp(2 * n));
        worst = std::max(worst, rel(prime, weight_at(t.ap(n == 0 ? 0 : 2 * n - 1))));
    }
    return {worst, 90, ""};
}

Measured boundary_specialization(const ModelParams& p) {
    double worst = 0.0;
    int n = 0;
    for (double u : logspace(0.1, 5.0, 12)) {
        const double a = pi_density(u, 0.0, p, 0.0, 1e-12).value;
        const double b = nu_density(2, u, p, NuMethod::theta_operator, 0.0, 1e-12).value;
        const double c = pi_density(0.0, u, p, 0.0, 1e-12).value;
        const double d = nu_density(1, u, p, NuMethod::theta_operator, 0.0, 1e-12).value;
        worst = std::max({worst, rel(a, b), rel(c, d)});
        n += 2;
    }
    return {worst, n, ""};
}

Measured nu_method_triangle(const ModelParams& p) {
    double worst = 0.0;
    int digits = 16;
    for (double u : linspace(0.05, 5.0, 100)) {
        const auto t = nu_density(1, u, p, NuMethod::theta_operator, 0.0, 1e-13);
        const auto b = nu_density(1, u, p, NuMethod::bi_infinite, 0.0, 1e-13);
        digits = std::max(digits, b.working_digits);
        worst = std::max(worst, rel(b.value, t.value));
        if (p.symmetric) {
            const auto s = nu_density(1, u, p, NuMethod::symmetric, 0.0, 1e-13);
            worst = std::max({worst, rel(s.value, t.value), rel(s.value, b.value)});
        }
    }
    return {worst, 100, "max working digits " + std::to_string(digits)};
}

Measured pi_normalization(const ModelParams& p) {
    const IntegralValue m = pi_mass(p);
    return {std::abs(m.value - 1.0) + m.error_bound, m.terms_used, "includes corner bound"};
}

Measured nu_normalization(const ModelParams& p) {
    double worst = 0.0;
    for (int side : {1, 2}) {
        const IntegralValue m = nu_moment(side, p, 0);
        worst = std::max(worst, std::abs(m.value - nu_mass(side, p)) + m.error_bound);
    }
    return {worst, 2, ""};
}

Measured nu_mean(const ModelParams& p) {
    double worst = 0.0;
    for (int side : {1, 2}) {
        const IntegralValue m = nu_moment(side, p, 1);
        worst = std::max(worst, std::abs(m.value / nu_mass(side, p) - rankgap::nu_mean(side, p)) + m.error_bound);
    }
    std::string note;
    if (p.symmetric) {
        const double lam = p.lambda1;
        const IntegralValue m = nu_moment(1, p, 1);
        worst = std::max(worst, std::abs(m.value / (2 * lam) - 2.0 / (3.0 * lam)) + m.error_bound);
        note = "includes E[G+H] = 2/(3 lambda)";
    }
    return {worst, 2, note};
}

Measured sigma_exponential_moment(const ModelParams& p) {
    if (!p.symmetric) return {0.0, 0, "not applicable"};
    const double lam = p.lambda1;
    const IntegralValue m = nu_moment(1, p, 0, lam);
    double prod = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        const double l = lam * (k + 2.0) * (k + 3.0) / 2.0;
        prod *= l / (l - lam);
    }
    // tail of the product: exp(sum_{k>K} lambda/l_k)
    prod *= std::exp(2.0 / (100000 + 3.0));
    return {std::max(std::abs(m.value / (2 * lam) - 2.0) + m.error_bound, std::abs(prod - 2.0)), 2, ""};
}

Measured pde(const ModelParams& p) {
    const double s = 2.0 / p.lambda_sum;
    const std::vector<double> g{0.3 * s, 0.6 * s, 1.0 * s, 1.5 * s};
    double worst = 0.0;
    for (double u : g)
        for (double v : g) worst = std::max(worst, pde_residual(u, v, p, 2e-3 * s).residual);
    return {worst, 16, ""};
}

Measured boundary_conditions(const ModelParams& p) {
    const double s = 2.0 / p.lambda_sum;
    double worst = 0.0;
    for (double c : {0.3 * s, 0.6 * s, 1.0 * s, 1.5 * s})
        for (int side : {1, 2}) worst = std::max(worst, boundary_residual(side, c, p, 1e-3 * s).residual);
    return {worst, 8, ""};
}

Eigen::ArrayXXd pi_transform_quadrature(const ModelParams& p, const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys) {
    using G = boost::math::quadrature::gauss<double, 20>;
    const double L = p.lambda_sum;
    const double cut = 0.25;
    std::vector<double> nodes, weights;
    const std::vector<double> breaks{0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4, 12.8, 25.6, 51.2, 102.4};
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k] / L, b = breaks[k + 1] / L, h = (b - a) / 2, c = (a + b) / 2;
        for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
            const double x = G::abscissa()[i], w = G::weights()[i];
            nodes.push_back(c - h * x);
            weights.push_back(h * w);
            if (x != 0.0) {
                nodes.push_back(c + h * x);
                weights.push_back(h * w);
            }
        }
    }
    const int n = int(nodes.size());
    Eigen::ArrayXXd f = Eigen::ArrayXXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (L * (nodes[i] + nodes[j]) < cut) continue;
            f(i, j) = pi_density(nodes[i], nodes[j], p, 1e-13).value;
        }
    Eigen::ArrayXXd out(xs.size(), ys.size());
    for (int a = 0; a < xs.size(); ++a)
        for (int b = 0; b < ys.size(); ++b) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const double wu = weights[i] * std::exp(-xs(a) * nodes[i]);
                double inner = 0.0;
                for (int j = 0; j < n; ++j) inner += weights[j] * std::exp(-ys(b) * nodes[j]) * f(i, j);
                s += wu * inner;
            }
            out(a, b) = s;
        }
    return out;
}

Measured bar_closed_loop(const ModelParams& p) {
    Eigen::ArrayXd g = Eigen::ArrayXd::LinSpaced(5, 0.0, 3.0);
    const Eigen::ArrayXXd q = pi_transform_quadrature(p, g, g);
    double worst = 0.0;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) worst = std::max(worst, rel(q(a, b), pi_hat(g(a), g(b), p).value.real()));
    const double corner = pi_corner_bound(p, 0.25 / p.lambda_sum);
    return {worst, 25, "excluded corner mass <= " + std::to_string(corner)};
}

Measured density_homogeneity(const ModelParams& p) {
    const ModelParams q = p.normalized();
    const double L = p.lambda_sum;
    double worst = 0.0;
    for (double u : {0.2, 0.5, 1.0, 2.0})
        for (double v : {0.2, 0.5, 1.0, 2.0}) {
            const double a = pi_density(u / L, v / L, p, 0.0, 1e-13).value;
            const double b = L * L * pi_density(u, v, q, 0.0, 1e-13).value;
            worst = std::max(worst, rel(a, b));
        }
    return {worst, 16, ""};
}

Measured marginal_routes(const ModelParams& p) {
    double worst = 0.0;
    const double L = p.lambda_sum;
    for (double s : {0.25, 0.3, 0.5, 1.0}) {
        const double u = s / L;
        for (const ModelParams& q : {p, p.swapped()}) {
            const double a = density_detail::marginal_G_density_series(u, q, 0.0, 1e-13).value;
            const double b = density_detail::marginal_G_density_theta(u, q, 1e-16).value;
            worst = std::max(worst, rel(a, b));
            worst = std::max(worst, std::abs(density_detail::marginal_G_cdf_series(u, q) -
                                             density_detail::marginal_G_cdf_theta(u, q)));
        }
    }
    worst = std::max(worst, std::abs(marginal_G_cdf(200.0 / L, p) - 1.0));
    return {worst, 17, ""};
}

Measured nonnegativity(const ModelParams& p) {
    const double s = 2.0 / p.lambda_sum;
    double worst = 0.0;
    for (double u : linspace(0.0, 3.0 * s, 50))
        for (double v : linspace(0.0, 3.0 * s, 50)) {
            if (p.lambda_sum * (u + v) < 0.25) continue;
            const auto d = pi_density(u, v, p, 1e-14);
            worst = std::max(worst, -(d.value + d.tail_bound + d.rounding_bound));
        }
    return {std::max(worst, 0.0), 2500, ""};
}

Eigen::ArrayXXd pi_cell_probabilities(const ModelParams& p, int bins, double range) {
    using G = boost::math::quadrature::gauss<double, 10>;
    std::vector<double> x, w;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
        x.push_back(-G::abscissa()[i]);
        w.push_back(G::weights()[i]);
        x.push_back(G::abscissa()[i]);
        w.push_back(G::weights()[i]);
    }
    const double h = range / bins;
    Eigen::ArrayXXd out(bins, bins);
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a)
                for (std::size_t b = 0; b < x.size(); ++b) {
                    const double u = (i + 0.5 + x[a] / 2) * h, v = (j + 0.5 + x[b] / 2) * h;
                    if (p.lambda_sum * (u + v) < pi_density_min_scaled_sum) continue;
                    s += w[a] * w[b] * pi_density(u, v, p, 1e-10).value;
                }
            out(i, j) = s * h * h / 4;
        }
    return out;
}

MonteCarloSummary simulate_and_compare(const ModelParams& p, std::uint64_t seed) {
    SimulationConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_chains = 8;
    cfg.thin_stride = 10;
    const double burn = effective_burn_in(p, cfg);
    cfg.t_total = burn + 125000 * cfg.thin_stride * cfg.dt;
    cfg.seed = seed;
    cfg.initial_positions = {0.0, -0.1, -0.2};
    const GapRun run = simulate_gaps(p, cfg);

    MonteCarloSummary out;
    out.samples = run.samples.size();
    out.tie_fraction = double(run.ties) / double(run.steps);
    std::vector<double> g;
    g.reserve(run.samples.size());
    double sum = 0.0;
    for (const auto& s : run.samples) {
        g.push_back(s.g);
        sum += s.g + s.h;
    }
    out.mean_sum = sum / run.samples.size();
    if (p.symmetric) {
        out.mean_sum_expected = 2.0 / (3.0 * p.lambda1);
    } else {
        boost::math::quadrature::exp_sinh<double> integrator;
        auto survival = [&](const ModelParams& q) {
            return integrator.integrate([&](double u) { return u <= 0.0 ? 1.0 : 1.0 - marginal_G_cdf(u, q); }, 1e-10);
        };
        out.mean_sum_expected = survival(p) + survival(p.swapped());
    }
    const auto emp = EmpiricalDistribution::from_samples(std::move(g));
    out.ks_G = ks_statistic(emp, [&](double u) { return marginal_G_cdf(u, p); });

    // batch means: each chain split into 10 consecutive blocks
    const int bins = 40;
    const double range = 4.0 / p.lambda_sum;
    std::vector<Eigen::ArrayXXd> batches;
    for (std::size_t c = 0; c < run.chain_offsets.size(); ++c) {
        const std::size_t lo = run.chain_offsets[c];
        const std::size_t hi = c + 1 < run.chain_offsets.size() ? run.chain_offsets[c + 1] : run.samples.size();
        for (int b = 0; b < 10; ++b) {
            const std::size_t a0 = lo + (hi - lo) * b / 10, a1 = lo + (hi - lo) * (b + 1) / 10;
            batches.push_back(histogram_2d({run.samples.begin() + a0, run.samples.begin() + a1}, bins, range));
        }
    }
    Eigen::ArrayXXd total = Eigen::ArrayXXd::Zero(bins, bins), sq = total;
    for (const auto& b : batches) {
        total += b;
        sq += b * b;
    }
    const double B = double(batches.size());
    const Eigen::ArrayXXd mean = total / B;
    const Eigen::ArrayXXd var = (sq / B - mean * mean) * B / (B - 1);
    const Eigen::ArrayXXd prob = pi_cell_probabilities(p, bins, range);
    const double N = double(run.samples.size());
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            const double expected = N * prob(i, j);
            if (expected < 25.0) continue;
            const double se = std::sqrt(std::max(B * var(i, j), expected));
            out.max_cell_z = std::max(out.max_cell_z, std::abs(total(i, j) - expected) / se);
            ++out.cells_tested;
        }
    return out;
}

ConvolutionSummary convolution_compare(const ModelParams& p, std::uint64_t seed, std::size_t ks_samples,
                                       std::size_t mean_samples) {
    ConvolutionSummary out;
    if (p.symmetric) {
        const auto e = sample_exp_convolution({ConvolutionCase::sum_GH_symmetric, 1}, p, ks_samples, 1000, seed);
        out.ks_sigma = ks_statistic(e, [&](double z) { return sigma_cdf(z, p); });
        out.samples += e.count;
    }
    for (int side : {1, 2}) {
        const auto e = sample_exp_convolution({ConvolutionCase::nu_general, side}, p, mean_samples, 1000, seed + side);
        const double mean = nu_moment(side, p, 1).value / nu_mass(side, p);
        out.mean_rel_error = std::max(out.mean_rel_error, std::abs(e.mean / mean - 1.0));
        out.samples += e.count;
    }
    return out;
}

}  // namespace checks

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t{
        {"kernel.branch_roots", 1e-12},
        {"kernel.decoupling_identity", 1e-10},
        {"kernel.gluing", 1e-8},
        {"kernel.conformal_inverse", 1e-10},
        {"kernel.boundary_ratio", 1e-10},
        {"laplace.carleman", 1e-8},
        {"laplace.continuation", 1e-8},
        {"laplace.invariance", 1e-8},
        {"laplace.homogeneity", 1e-10},
        {"laplace.product_vs_trig", 1e-8},
        {"laplace.telescoping", 1e-8},
        {"laplace.diagonal", 1e-10},
        {"theta.modular", 1e-12},
        {"theta.double_accuracy", 1e-12},
        {"theta.ramanujan", 1e-12},
        {"theta.entrance_identity", 1e-10},
        {"theta.laplace_quadrature", 1e-8},
        {"density.compensation_roots", 1e-9},
        {"density.compensation_recursion", 1e-12},
        {"density.grouped_coefficients", 1e-12},
        {"density.boundary_specialization", 1e-8},
        {"density.nu_methods", 1e-10},
        {"density.pi_normalization", 1e-10},
        {"density.nu_normalization", 1e-8},
        {"density.nu_mean", 1e-8},
        {"density.sigma_exponential_moment", 1e-6},
        {"density.pde", 1e-5},
        {"density.boundary_conditions", 1e-5},
        {"density.bar_closed_loop", 1e-6},
        {"density.homogeneity", 1e-10},
        {"density.marginal_routes", 1e-10},
        {"density.nonnegativity", 1e-14},
        {"stochastic.ks_marginal_G", 0.02},
        {"stochastic.mean_G_plus_H", 0.01},
        {"stochastic.histogram_max_z", 6.0},
        {"stochastic.convolution_ks", 0.01},
        {"stochastic.convolution_mean", 0.005},
    };
    return t;
}

namespace {

using Clock = std::chrono::steady_clock;

CheckResult run_check(const std::string& name, double tol, const std::function<checks::Measured()>& f) {
    CheckResult r;
    r.name = name;
    r.tolerance = tol;
    const auto t0 = Clock::now();
    try {
        const checks::Measured m = f();
        r.residual = m.residual;
        r.grid_size = m.grid_size;
        r.note = m.note;
        r.pass = std::isfinite(m.residual) && m.residual <= tol;
        if (!std::isfinite(m.residual)) r.note += (r.note.empty() ? "" : "; ") + std::string("non-finite residual");
    } catch (const std::exception& e) {
        r.residual = std::numeric_limits<double>::infinity();
        r.pass = false;
        r.note = std::string("exception: ") + e.what();
    }
    r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    return r;
}

}  // namespace

VerificationReport run_verification(const ModelParams& p, VerifyLevel level, std::uint64_t seed,
                                    const std::map<std::string, double>& overrides) {
    if (!(p.lambda1 > 0.0) || !(p.lambda2 > 0.0)) throw ParameterError("verification: rates must be positive");
    for (const auto& [k, v] : overrides)
        if (!default_tolerances().contains(k)) throw UsageError("unknown check in tolerance override: " + k);
    auto tol = [&](const std::string& name) {
        auto it = overrides.find(name);
        return it != overrides.end() ? it->second : default_tolerances().at(name);
    };
    using M = checks::Measured;
    std::vector<std::pair<std::string, std::function<M()>>> list{
        {"kernel.branch_roots", [&] { return checks::branch_roots(p); }},
        {"kernel.decoupling_identity", [&] { return checks::decoupling_identity(p); }},
        {"kernel.gluing", [&] { return checks::gluing(p); }},
        {"kernel.conformal_inverse", [&] { return checks::conformal_inverse(p); }},
        {"kernel.boundary_ratio", [&] { return checks::boundary_ratio(p); }},
        {"laplace.carleman", [&] { return checks::carleman(p); }},
        {"laplace.continuation", [&] { return checks::continuation(p); }},
        {"laplace.invariance", [&] { return checks::invariance(p); }},
        {"laplace.homogeneity", [&] { return checks::transform_homogeneity(p); }},
        {"laplace.product_vs_trig", [&] { return checks::product_vs_trig(p); }},
        {"laplace.telescoping", [&] { return checks::telescoping(p); }},
        {"laplace.diagonal", [&] { return checks::diagonal_transform(p); }},
        {"theta.modular", [&] { return checks::theta_modular(); }},
        {"theta.double_accuracy", [&] { return checks::theta_double_accuracy(); }},
        {"theta.ramanujan", [&] { return checks::theta_ramanujan(); }},
        {"theta.entrance_identity", [&] { return checks::theta_entrance_identity(); }},
        {"theta.laplace_quadrature", [&] { return checks::theta_laplace_quadrature(p); }},
        {"density.compensation_roots", [&] { return checks::compensation_roots(p); }},
        {"density.compensation_recursion", [&] { return checks::compensation_recursion(p); }},
        {"density.grouped_coefficients", [&] { return checks::grouped_coefficients(p); }},
        {"density.boundary_specialization", [&] { return checks::boundary_specialization(p); }},
        {"density.nu_methods", [&] { return checks::nu_method_triangle(p); }},
        {"density.pi_normalization", [&] { return checks::pi_normalization(p); }},
        {"density.nu_normalization", [&] { return checks::nu_normalization(p); }},
        {"density.nu_mean", [&] { return checks::nu_mean(p); }},
        {"density.pde", [&] { return checks::pde(p); }},
        {"density.boundary_conditions", [&] { return checks::boundary_conditions(p); }},
        {"density.bar_closed_loop", [&] { return checks::bar_closed_loop(p); }},
        {"density.homogeneity", [&] { return checks::density_homogeneity(p); }},
        {"density.marginal_routes", [&] { return checks::marginal_routes(p); }},
        {"density.nonnegativity", [&] { return checks::nonnegativity(p); }},
    };
    if (p.symmetric)
        list.emplace_back("density.sigma_exponential_moment", [&] { return checks::sigma_exponential_moment(p); });

    VerificationReport report;
    report.params = p;
    report.level = level;
    report.seed = seed;

    const int workers = std::max(1, thread_count());
    std::vector<CheckResult> results(list.size());
    {
        std::vector<std::future<void>> running;
        std::size_t next = 0;
        auto launch = [&] {
            const std::size_t i = next++;
            running.push_back(std::async(std::launch::async, [&, i] {
                results[i] = run_check(list[i].first, tol(list[i].first), list[i].second);
            }));
        };
        while (next < list.size()) {
            while (next < list.size() && int(running.size()) < workers) launch();
            running.front().get();
            running.erase(running.begin());
        }
        for (auto& f : running) f.get();
    }
    report.checks = std::move(results);

    if (level == VerifyLevel::full) {
        checks::MonteCarloSummary mc;
        bool mc_ok = true;
        std::string err;
        auto t0 = Clock::now();
        try {
            mc = checks::simulate_and_compare(p, seed);
        } catch (const std::exception& e) {
            mc_ok = false;
            err = e.what();
        }
        auto since = [](Clock::time_point t) {
            return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t).count();
        };
        const long long mc_ms = since(t0);
        const std::size_t mc_first = report.checks.size();
        auto from_mc = [&](double v, int n, std::string note) {
            if (!mc_ok) throw Error(err);
            return checks::Measured{v, n, std::move(note)};
        };
        const std::string info = "seed " + std::to_string(seed) + ", " + std::to_string(mc.samples) + " samples";
        report.checks.push_back(run_check("stochastic.ks_marginal_G", tol("stochastic.ks_marginal_G"),
                                          [&] { return from_mc(mc.ks_G, int(mc.samples), info); }));
        report.checks.push_back(run_check("stochastic.mean_G_plus_H", tol("stochastic.mean_G_plus_H"), [&] {
            return from_mc(std::abs(mc.mean_sum - mc.mean_sum_expected), int(mc.samples), info);
        }));
        report.checks.push_back(run_check("stochastic.histogram_max_z", tol("stochastic.histogram_max_z"), [&] {
            return from_mc(mc.max_cell_z, mc.cells_tested, info + ", batch-means standard errors");
        }));
        for (std::size_t i = mc_first; i < report.checks.size(); ++i) report.checks[i].elapsed_ms += mc_ms;
        checks::ConvolutionSummary cv;
        bool cv_ok = true;
        t0 = Clock::now();
        try {
            cv = checks::convolution_compare(p, seed, 1000000, 200000);
        } catch (const std::exception& e) {
            cv_ok = false;
            err = e.what();
        }
        const long long cv_ms = since(t0);
        const std::size_t cv_first = report.checks.size();
        auto from_cv = [&](double v, std::string note) {
            if (!cv_ok) throw Error(err);
            return checks::Measured{v, int(cv.samples), std::move(note)};
        };
        if (p.symmetric)
            report.checks.push_back(run_check("stochastic.convolution_ks", tol("stochastic.convolution_ks"),
                                              [&] { return from_cv(cv.ks_sigma, "k_max 1000, seed " + std::to_string(seed)); }));
        report.checks.push_back(run_check("stochastic.convolution_mean", tol("stochastic.convolution_mean"),
                                          [&] { return from_cv(cv.mean_rel_error, "k_max 1000, both sides"); }));
        for (std::size_t i = cv_first; i < report.checks.size(); ++i) report.checks[i].elapsed_ms += cv_ms;
    }

    std::sort(report.checks.begin(), report.checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    report.overall_pass = std::all_of(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.pass; });
    return report;
}

std::string report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json params;
    params["lambda1"] = r.params.lambda1;
    params["lambda2"] = r.params.lambda2;
    params["mu1"] = r.params.mu1;
    params["mu2"] = r.params.mu2;
    params["lambda_sum"] = r.params.lambda_sum;
    params["symmetric"] = r.params.symmetric;
    if (r.params.deltas) params["deltas"] = *r.params.deltas;
    j["params"] = params;
    j["level"] = r.level == VerifyLevel::quick ? "quick" : "full";
    j["seed"] = r.seed;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["residual"] = std::isfinite(c.residual) ? nlohmann::ordered_json(c.residual) : nlohmann::ordered_json("inf");
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        e["grid_size"] = c.grid_size;
        e["elapsed_ms"] = c.elapsed_ms;
        if (!c.note.empty()) e["note"] = c.note;
        list.push_back(e);
    }
    j["checks"] = list;
    j["overall_pass"] = r.overall_pass;
    return j.dump(2);
}

}  // namespace rankgap
