#include "rankgap/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankgap/density_series.hpp"
#include "rankgap/errors.hpp"
#include "rankgap/laplace.hpp"
#include "rankgap/precision.hpp"
#include "rankgap/theta.hpp"

namespace rankgap {

using precision::SeriesSum;
using precision::TermValue;

CompensationTables compensation_tables(const ModelParams& p, int N) {
    if (N < 2) throw UsageError("compensation_tables: need N >= 2");
    const series::Compensation<double> s(p), t(p.swapped());
    CompensationTables tab;
    tab.N = N;
    tab.a.resize(N + 1);
    tab.b.resize(N + 1);
    tab.c.resize(N + 1);
    tab.ap.resize(N + 1);
    tab.bp.resize(N + 1);
    tab.cp.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        tab.a(n) = s.a(n);
        tab.b(n) = s.b(n);
        tab.c(n) = s.c(n);
        tab.ap(n) = t.b(n);
        tab.bp(n) = t.a(n);
        tab.cp(n) = t.c(n);
    }
    tab.C = s.C();
    tab.Cp = t.C();
    return tab;
}

void compensation_c_recursive(const ModelParams& p, int N, Eigen::ArrayXd& c, Eigen::ArrayXd& cp) {
    auto run = [N](const ModelParams& q, Eigen::ArrayXd& out) {
        const series::Compensation<double> s(q);
        const double l1 = q.lambda1, l2 = q.lambda2;
        out.resize(N + 1);
        out(0) = 1.0;
        for (int n = 0; n + 1 <= N; ++n) {
            if (n % 2 == 0)
                out(n + 1) = -out(n) * (3 * s.a(n) - 2 * s.b(n) + 2 * l2) / (3 * s.a(n + 1) - 2 * s.b(n + 1) + 2 * l2);
            else
                out(n + 1) = -out(n) * (-2 * s.a(n) + 3 * s.b(n) + 2 * l1) / (-2 * s.a(n + 1) + 3 * s.b(n + 1) + 2 * l1);
        }
    };
    run(p, c);
    run(p.swapped(), cp);
}

double compensation_pair_closed(const ModelParams& p, int n) {
    const double m = p.mu2, x = n;
    return -(x + 1) * (x + 2) * (x + 3) * (x + 1 + m) * (x + 2 + m) * (x + 3 + m) * (x + 2 + m / 2) /
           (3 * m * (1 + m) * (2 + m) * (3 + m));
}

namespace {

DensityValue to_density(const precision::Evaluation& e) {
    return {e.value, 2 * (e.last + 1), e.tail, e.rounding, e.digits};
}

void check_positive(double u, const char* what) {
    if (!std::isfinite(u) || !(u > 0.0)) throw DomainError(std::string(what) + ": argument must be positive");
}

}  // namespace

DensityValue pi_density(double u, double v, const ModelParams& p, double tol, double rel_tol) {
    if (!std::isfinite(u) || !std::isfinite(v) || u < 0.0 || v < 0.0)
        throw DomainError("pi_density: need u, v >= 0");
    if (p.lambda_sum * (u + v) < pi_density_min_scaled_sum)
        throw ConvergenceError(
            "pi_density: too close to the origin for the compensation series; use the theta-operator "
            "boundary densities instead");
    const ModelParams q = p.swapped();
    auto env = [&](int m) {
        return series::compensation_pair_envelope(p, m, u, v) + series::compensation_pair_envelope(q, m, v, u);
    };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        const series::Compensation<Real> s(p), t(q);
        const Real C = s.C(), Cp = t.C(), U(u), V(v);
        auto term = [&](int m) {
            const TermValue<Real> x = series::compensation_pair(s, C, m, U, V);
            const TermValue<Real> y = series::compensation_pair(t, Cp, m, V, U);
            return TermValue<Real>{x.value + y.value, x.abs + y.abs};
        };
        return precision::pair_sum<Real>(term, env, 0, trunc, fixed);
    };
    return to_density(precision::evaluate(f, tol, rel_tol));
}

namespace {

DensityValue nu_bi_infinite(double u, const ModelParams& p, double tol, double rel_tol) {
    auto env = [&](int m) { return series::boundary_pair_envelope(p, m, u); };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        using std::exp;
        using std::abs;
        const series::BoundarySeries<Real> s(p);
        const Real U(u);
        auto term = [&](int m) {
            const Real t0 = s.weight(m) * exp(-s.rate(m) * U);
            const Real t1 = s.weight(-m) * exp(-s.rate(-m) * U);
            return TermValue<Real>{t0 + t1, abs(t0) + abs(t1)};
        };
        return precision::pair_sum<Real>(term, env, 2, trunc, fixed);
    };
    return to_density(precision::evaluate(f, tol, rel_tol));
}

template <class Real>
Real symmetric_coefficient(long n) {
    const Real x(n);
    const Real s = (n % 2 == 1) ? Real(1) : Real(-1);
    return s / 12 * (x - 2) * (x - 1) * x * (x + 1) * (x + 2) * (x + 3) * (2 * x + 1);
}

DensityValue nu_symmetric(double u, const ModelParams& p, double tol, double rel_tol) {
    const double lam = p.lambda1;
    // pair m holds n = 2m+1 and n = 2m+2
    auto env = [&](int m) {
        const long n = 2 * m + 1;
        return lam * lam * (std::abs(symmetric_coefficient<double>(n)) + std::abs(symmetric_coefficient<double>(n + 1))) *
               std::exp(-n * (n + 1.0) * lam * u / 2.0);
    };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        using std::exp;
        using std::abs;
        const Real l(lam), U(u);
        auto term = [&](int m) {
            const long n = 2 * m + 1;
            const Real t0 = l * l * symmetric_coefficient<Real>(n) * exp(-Real(n) * Real(n + 1) * l * U / 2);
            const Real t1 = l * l * symmetric_coefficient<Real>(n + 1) * exp(-Real(n + 1) * Real(n + 2) * l * U / 2);
            return TermValue<Real>{t0 + t1, abs(t0) + abs(t1)};
        };
        return precision::pair_sum<Real>(term, env, 1, trunc, fixed);
    };
    return to_density(precision::evaluate(f, tol, rel_tol));
}

// kappa (sum_k w_k f^(k)) with f(u) = theta_mu(e^{-L u}); tolerance is absolute on the result.
DensityValue theta_operator(double u, double mu, const double (&w)[4], double kappa, double L, double tol) {
    const SeriesValue s = theta_mu_combination(u, mu, w, tol / std::abs(kappa), L);
    const double eps = std::numeric_limits<double>::epsilon();
    const double value = kappa * s.value;
    return {value, s.terms_used, std::abs(kappa) * s.tail_bound, 64 * eps * std::abs(value), 16};
}

double kappa(const ModelParams& p) { return 4.0 * p.lambda_sum / (3.0 * p.lambda1 * p.lambda2); }

DensityValue nu_theta_operator(double u, const ModelParams& p, double tol, double rel_tol) {
    const double L = p.lambda_sum;
    const double w[4] = {0.0, p.lambda2 * (2 * p.lambda1 + p.lambda2), 2 * L, 1.0};
    // a first pass fixes the scale for the relative target
    DensityValue r = theta_operator(u, p.mu1, w, kappa(p), L, std::max(tol, 1e-300));
    const double target = std::max(tol, rel_tol * std::abs(r.value));
    if (r.tail_bound > target && target > 0.0) r = theta_operator(u, p.mu1, w, kappa(p), L, target);
    return r;
}

}  // namespace

DensityValue nu_density(int side, double u, const ModelParams& p, NuMethod method, double tol, double rel_tol) {
    check_side(side);
    check_positive(u, "nu_density");
    const ModelParams q = side == 1 ? p : p.swapped();
    switch (method) {
        case NuMethod::bi_infinite:
            return nu_bi_infinite(u, q, tol, rel_tol);
        case NuMethod::theta_operator:
            return nu_theta_operator(u, q, tol, rel_tol);
        case NuMethod::symmetric:
            if (!p.symmetric) throw UsageError("nu_density: the symmetric method needs lambda1 == lambda2");
            return nu_symmetric(u, q, tol, rel_tol);
    }
    throw UsageError("nu_density: unknown method");
}

std::vector<ExpTerm> nu_series_terms(int side, const ModelParams& p, int n_max) {
    check_side(side);
    const series::BoundarySeries<double> s(side == 1 ? p : p.swapped());
    std::vector<ExpTerm> out;
    for (int n = 2; n <= n_max; ++n) {
        out.push_back({s.weight(n), s.rate(n)});
        out.push_back({s.weight(-n), s.rate(-n)});
    }
    std::sort(out.begin(), out.end(), [](const ExpTerm& x, const ExpTerm& y) { return x.rate < y.rate; });
    return out;
}

std::vector<ExpTerm> nu_symmetric_terms(const ModelParams& p, int count) {
    if (!p.symmetric) throw UsageError("nu_symmetric_terms: needs lambda1 == lambda2");
    const double lam = p.lambda1;
    std::vector<ExpTerm> out;
    for (int n = 3; n < 3 + count; ++n)
        out.push_back({lam * lam * symmetric_coefficient<double>(n), n * (n + 1.0) * lam / 2.0});
    return out;
}

namespace density_detail {

// Half the side-2 boundary series integrated against e^{lambda1 z}: each term
// W e^{-r u} contributes W e^{-r u} / (2 (r - lambda1)).
DensityValue marginal_G_density_series(double u, const ModelParams& p, double tol, double rel_tol) {
    const ModelParams q = p.swapped();
    const double l1 = p.lambda1;
    auto env = [&](int m) {
        const series::BoundarySeries<double> s(q);
        return 0.5 * (std::abs(s.weight(m)) / (s.rate(m) - l1) + std::abs(s.weight(-m)) / (s.rate(-m) - l1)) *
               std::exp(-s.rate(-m) * u);
    };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        using std::exp;
        using std::abs;
        const series::BoundarySeries<Real> s(q);
        const Real U(u), L1(l1);
        auto term = [&](int m) {
            const Real r0 = s.rate(m), r1 = s.rate(-m);
            const Real t0 = s.weight(m) * exp(-r0 * U) / (2 * (r0 - L1));
            const Real t1 = s.weight(-m) * exp(-r1 * U) / (2 * (r1 - L1));
            return TermValue<Real>{t0 + t1, abs(t0) + abs(t1)};
        };
        return precision::pair_sum<Real>(term, env, 2, trunc, fixed);
    };
    return to_density(precision::evaluate(f, tol, rel_tol));
}

// e^{-l1 u} nu1hat(0) - (kappa/2)(f'' + (l1 + 2 l2) f'), f(u) = theta_mu2(e^{-L u}).
DensityValue marginal_G_density_theta(double u, const ModelParams& p, double tol) {
    const double w[4] = {0.0, p.lambda1 + 2 * p.lambda2, 1.0, 0.0};
    DensityValue r = theta_operator(u, p.mu2, w, -kappa(p) / 2, p.lambda_sum, tol);
    r.value += std::exp(-p.lambda1 * u) * nu_mass(1, p);
    return r;
}

// 1 - sum over pairs of C c_n e^{-a_n u}/(a_n b_n), primed likewise.
double marginal_G_cdf_series(double u, const ModelParams& p) {
    const ModelParams q = p.swapped();
    auto env = [&](int m) {
        const series::Compensation<double> s(p), t(q);
        // u-exponents: a_n for the unprimed, a'_n = b_n(swapped) for the primed
        const double e0 = s.C() * (std::abs(s.c(2 * m)) + std::abs(s.c(2 * m + 1))) /
                          (s.a_even(m) * s.b_even(m)) * std::exp(-s.a_even(m) * u);
        const double e1 = t.C() * (std::abs(t.c(2 * m)) + std::abs(t.c(2 * m + 1))) /
                          (t.b_even(m) * t.a_even(m)) * std::exp(-t.b_even(m) * u);
        return e0 + e1;
    };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        using std::exp;
        using std::abs;
        const series::Compensation<Real> s(p), t(q);
        const Real C = s.C(), Cp = t.C(), U(u);
        auto term = [&](int m) {
            const Real a = s.a_even(m), b0 = s.b_even(m), b1 = s.b_even(m + 1);
            const Real ea = exp(-a * U);
            const Real x0 = C * s.c(2 * m) * ea / (a * b0), x1 = C * s.c(2 * m + 1) * ea / (a * b1);
            // primed: (a', b') = (b, a) of the swapped sequence; a'_{2m+1} = a'_{2m+2}, b'_{2m+1} = b'_{2m}
            const Real ap0 = t.b_even(m), ap1 = t.b_even(m + 1), bp = t.a_even(m);
            const Real y0 = Cp * t.c(2 * m) * exp(-ap0 * U) / (ap0 * bp);
            const Real y1 = Cp * t.c(2 * m + 1) * exp(-ap1 * U) / (ap1 * bp);
            return TermValue<Real>{x0 + x1 + y0 + y1, abs(x0) + abs(x1) + abs(y0) + abs(y1)};
        };
        return precision::pair_sum<Real>(term, env, 0, trunc, fixed);
    };
    return 1.0 - precision::evaluate(f, 1e-15, 0.0).value;
}

// nu1hat(0)(1 - e^{-l1 u})/l1 - (kappa/2)(f' + (l1 + 2 l2) f).
double marginal_G_cdf_theta(double u, const ModelParams& p) {
    const double w[4] = {p.lambda1 + 2 * p.lambda2, 1.0, 0.0, 0.0};
    const SeriesValue s = theta_mu_combination(u, p.mu2, w, 1e-16, p.lambda_sum);
    return nu_mass(1, p) * -std::expm1(-p.lambda1 * u) / p.lambda1 - kappa(p) / 2 * s.value;
}

}  // namespace density_detail

DensityValue marginal_G_density(double u, const ModelParams& p, double tol, double rel_tol) {
    check_positive(u, "marginal_G_density");
    if (p.lambda_sum * u < marginal_series_min_scaled) {
        DensityValue r = density_detail::marginal_G_density_theta(u, p, std::max(tol, 1e-300));
        const double target = std::max(tol, rel_tol * std::abs(r.value));
        if (r.tail_bound > target) r = density_detail::marginal_G_density_theta(u, p, target);
        return r;
    }
    return density_detail::marginal_G_density_series(u, p, tol, rel_tol);
}

DensityValue marginal_H_density(double u, const ModelParams& p, double tol, double rel_tol) {
    return marginal_G_density(u, p.swapped(), tol, rel_tol);
}

double marginal_G_cdf(double u, const ModelParams& p) {
    if (!(u >= 0.0) || std::isnan(u)) throw DomainError("marginal_G_cdf: need u >= 0");
    if (u == 0.0) return 0.0;
    if (std::isinf(u)) return 1.0;
    const double F = p.lambda_sum * u < marginal_series_min_scaled ? density_detail::marginal_G_cdf_theta(u, p)
                                                                   : density_detail::marginal_G_cdf_series(u, p);
    return std::clamp(F, 0.0, 1.0);
}

double marginal_H_cdf(double u, const ModelParams& p) { return marginal_G_cdf(u, p.swapped()); }

double nu_cdf(int side, double z, const ModelParams& p) {
    check_side(side);
    if (!(z >= 0.0) || std::isnan(z)) throw DomainError("nu_cdf: need z >= 0");
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;
    const ModelParams q = side == 1 ? p : p.swapped();
    const double L = q.lambda_sum;
    const double w[4] = {q.lambda2 * (2 * q.lambda1 + q.lambda2), 2 * L, 1.0, 0.0};
    const SeriesValue s = theta_mu_combination(z, q.mu1, w, 1e-16, L);
    return std::clamp(kappa(q) * s.value / nu_mass(1, q), 0.0, 1.0);
}

DensityValue sigma_density(double z, const ModelParams& p, double tol, double rel_tol) {
    if (!p.symmetric) throw UsageError("sigma_density: only available for lambda1 == lambda2");
    const double s = 2.0 * p.lambda1;
    DensityValue r = nu_density(1, z, p, NuMethod::theta_operator, tol * s, rel_tol);
    r.value /= s;
    r.tail_bound /= s;
    r.rounding_bound /= s;
    return r;
}

double sigma_cdf(double z, const ModelParams& p) {
    if (!p.symmetric) throw UsageError("sigma_cdf: only available for lambda1 == lambda2");
    return nu_cdf(1, z, p);
}

namespace {

double pi_value(double u, double v, const ModelParams& p) {
    return pi_density(u, v, p, 1e-300, 1e-15).value;
}

}  // namespace

ResidualValue pde_residual(double u, double v, const ModelParams& p, double h) {
    if (!(h > 0.0)) throw DomainError("pde_residual: step must be positive");
    if (!(u > 2 * h && v > 2 * h)) throw DomainError("pde_residual: point too close to the boundary for the stencil");
    // along (1,-1) for the mixed operator, plus the axis first derivatives
    auto f = [&](double du, double dv) { return pi_value(u + du, v + dv, p); };
    const double f0 = f(0, 0);
    const double d2 = (-f(2 * h, -2 * h) + 16 * f(h, -h) - 30 * f0 + 16 * f(-h, h) - f(-2 * h, 2 * h)) / (12 * h * h);
    const double du = (-f(2 * h, 0) + 8 * f(h, 0) - 8 * f(-h, 0) + f(-2 * h, 0)) / (12 * h);
    const double dv = (-f(0, 2 * h) + 8 * f(0, h) - 8 * f(0, -h) + f(0, -2 * h)) / (12 * h);
    const double g = d2 + p.lambda1 * du + p.lambda2 * dv;
    const double scale = std::max(std::abs(f0), 1e-30);
    const double eps = std::numeric_limits<double>::epsilon();
    return {std::abs(g) / scale, 64 * eps / (h * h) > 1e-6};
}

ResidualValue boundary_residual(int side, double coordinate, const ModelParams& p, double h) {
    check_side(side);
    if (!(h > 0.0)) throw DomainError("boundary_residual: step must be positive");
    if (!(coordinate > 2 * h)) throw DomainError("boundary_residual: coordinate too small for the stencil");
    // side 1: face u = 0, operator 2 d_u - 3 d_v + 2 lambda1; side 2: face v = 0, -3 d_u + 2 d_v + 2 lambda2
    auto f = [&](double normal, double tangent) {
        return side == 1 ? pi_value(normal, coordinate + tangent, p) : pi_value(coordinate + tangent, normal, p);
    };
    const double f0 = f(0, 0);
    const double dn = (-25 * f0 + 48 * f(h, 0) - 36 * f(2 * h, 0) + 16 * f(3 * h, 0) - 3 * f(4 * h, 0)) / (12 * h);
    const double dt = (-f(0, 2 * h) + 8 * f(0, h) - 8 * f(0, -h) + f(0, -2 * h)) / (12 * h);
    const double g = side == 1 ? 2 * dn - 3 * dt + 2 * p.lambda1 * f0 : -3 * dt + 2 * dn + 2 * p.lambda2 * f0;
    const double scale = std::max(std::abs(f0), 1e-30);
    const double eps = std::numeric_limits<double>::epsilon();
    return {std::abs(g) / scale, 64 * eps / h > 1e-8};
}

}  // namespace rankgap
