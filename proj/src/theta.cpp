#include "rankgap/theta.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rankgap/errors.hpp"
#include "rankgap/kernel.hpp"
#include "rankgap/series.hpp"
#include "rankgap/theta_series.hpp"

namespace rankgap {

using std::numbers::pi;

namespace {

void check_theta_args(double u, double mu, double tol) {
    if (!std::isfinite(u) || !(u > 0.0)) throw DomainError("theta: need u > 0 (nome must lie in (0,1))");
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("theta: need mu in (0,1)");
    if (!(tol > 0.0)) throw DomainError("theta: tolerance must be positive");
}

SeriesValue combination(double u, double mu, const theta_detail::Weights& w, double tol, double scale) {
    check_theta_args(u, mu, tol);
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("theta: scale must be positive");
    SeriesValue r;
    const double v = scale * u;
    if (v >= pi) {
        auto s = theta_detail::direct_sum<double>(u, mu, w, scale, tol);
        r = {s.value, s.terms, s.tail, SeriesRegime::direct};
    } else {
        auto s = theta_detail::transformed_sum<double>(u, mu, w, scale, tol);
        r = {s.value, s.terms, s.tail, SeriesRegime::transformed};
    }
    require_finite(r.value, "theta");
    return r;
}

}  // namespace

SeriesValue theta_mu(double u, double mu, double tol) {
    return combination(u, mu, {1.0, 0.0, 0.0, 0.0}, tol, 1.0);
}

SeriesValue theta_mu_derivative(double u, double mu, int order, double tol, double scale) {
    if (order < 1 || order > 3) throw DomainError("theta_mu_derivative: order must be 1, 2 or 3");
    theta_detail::Weights w{0.0, 0.0, 0.0, 0.0};
    w[order] = 1.0;
    return combination(u, mu, w, tol, scale);
}

SeriesValue theta_mu_derivative(double u, double mu, int order, double tol, const ModelParams& p) {
    return theta_mu_derivative(u, mu, order, tol, p.lambda_sum);
}

SeriesValue theta_mu_combination(double u, double mu, const double (&w)[4], double tol, double scale) {
    return combination(u, mu, {w[0], w[1], w[2], w[3]}, tol, scale);
}

double theta_laplace_closed(double x, const ModelParams& p) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("theta_laplace_closed: need x >= 0");
    if (x == 0.0)
        throw SingularityError("theta_laplace_closed: pole at x = 0 (constant term of theta)", 0.0);
    const double L = p.lambda_sum;
    const double mu = p.mu1;
    return pi * std::sin(pi * mu) / (L * cos_pi_sqrt_diff(mu, -4.0 * x / L));
}

namespace theta_detail {

SeriesValue killed_bm_images(double t, double x, double y, double tol) {
    const double norm = 1.0 / std::sqrt(2.0 * pi * t);
    auto term = [&](int n) {
        const double a = x - y + 2.0 * n, b = x + y + 2.0 * n;
        return std::exp(-a * a / (2.0 * t)) - std::exp(-b * b / (2.0 * t));
    };
    auto envelope = [&](int m) {
        const double d = 2.0 * m - 2.0;
        return 4.0 * norm * std::exp(-d * d / (2.0 * t));
    };
    CompensatedSum<double> acc;
    acc.add(term(0));
    int m = 1;
    double tail = std::numeric_limits<double>::infinity();
    for (;; ++m) {
        acc.add(term(m) + term(-m));
        if (m >= 3 && envelope(m + 1) < tol / 10) {
            tail = geometric_tail(envelope(m + 1), envelope(m + 2), envelope(m + 3));
            if (tail <= tol) break;
        }
        if (m > max_terms) throw ConvergenceError("killed_bm_density: term cap exceeded");
    }
    return {std::max(0.0, norm * acc.value()), 2 * m + 1, tail, SeriesRegime::direct};
}

SeriesValue killed_bm_eigen(double t, double x, double y, double tol) {
    auto envelope = [&](int n) { return 2.0 * std::exp(-n * double(n) * pi * pi * t / 2.0); };
    CompensatedSum<double> acc;
    int n = 1;
    double tail = std::numeric_limits<double>::infinity();
    for (;; ++n) {
        acc.add(2.0 * std::sin(n * pi * x) * std::sin(n * pi * y) * std::exp(-n * double(n) * pi * pi * t / 2.0));
        if (n >= 3 && envelope(n + 1) < tol / 10) {
            tail = geometric_tail(envelope(n + 1), envelope(n + 2), envelope(n + 3));
            if (tail <= tol) break;
        }
        if (n > max_terms) throw ConvergenceError("killed_bm_density: term cap exceeded");
    }
    return {std::max(0.0, acc.value()), n, tail, SeriesRegime::transformed};
}

}  // namespace theta_detail

SeriesValue killed_bm_density(double t, double x, double y, double tol) {
    if (!std::isfinite(t) || !(t > 0.0)) throw DomainError("killed_bm_density: need t > 0");
    if (!(x > 0.0 && x < 1.0) || !(y > 0.0 && y < 1.0))
        throw DomainError("killed_bm_density: need x, y in (0,1)");
    if (!(tol > 0.0)) throw DomainError("killed_bm_density: tolerance must be positive");
    return t >= 1.0 ? theta_detail::killed_bm_eigen(t, x, y, tol) : theta_detail::killed_bm_images(t, x, y, tol);
}

SeriesValue entrance_density(double t, double y, double tol) {
    if (!std::isfinite(t) || !(t > 0.0)) throw DomainError("entrance_density: need t > 0");
    if (!(y > 0.0 && y < 1.0)) throw DomainError("entrance_density: need y in (0,1)");
    if (!(tol > 0.0)) throw DomainError("entrance_density: tolerance must be positive");
    const double pre = 2.0 * std::sin(pi * y);
    auto envelope = [&](int n) { return 2.0 * n * std::exp(-pi * pi * (n * double(n) - 1.0) * t / 2.0); };
    CompensatedSum<double> acc;
    int n = 1;
    double tail = std::numeric_limits<double>::infinity();
    for (;; ++n) {
        acc.add(n * std::sin(n * pi * y) * std::exp(-pi * pi * (n * double(n) - 1.0) * t / 2.0));
        if (n >= 3 && envelope(n + 1) < tol / 10) {
            tail = geometric_tail(envelope(n + 1), envelope(n + 2), envelope(n + 3));
            if (tail <= tol) break;
        }
        if (n > theta_detail::max_terms) throw ConvergenceError("entrance_density: term cap exceeded");
    }
    return {std::max(0.0, pre * acc.value()), n, tail, SeriesRegime::direct};
}

namespace {

SeriesValue ramanujan(double a, double b, double tol, bool weighted) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ramanujan: need a, b > 0");
    if (!(a * b < 1.0)) throw DomainError("ramanujan: series diverges for |ab| >= 1");
    if (!(tol > 0.0)) throw DomainError("ramanujan: tolerance must be positive");
    const double la = std::log(a), lb = std::log(b);
    auto power = [&](int n) { return std::exp(0.5 * n * (n + 1.0) * la + 0.5 * n * (n - 1.0) * lb); };
    auto envelope = [&](int n) {
        const double e = 0.5 * n * double(n) * (la + lb) + 0.5 * n * std::abs(la - lb);
        return 2.0 * (weighted ? n : 1) * std::exp(e);
    };
    CompensatedSum<double> acc;
    if (!weighted) acc.add(1.0);
    int n = 1;
    double tail = std::numeric_limits<double>::infinity();
    for (;; ++n) {
        acc.add(weighted ? n * (power(n) - power(-n)) : power(n) + power(-n));
        if (n >= 3 && envelope(n + 1) < tol / 10) {
            tail = geometric_tail(envelope(n + 1), envelope(n + 2), envelope(n + 3));
            if (tail <= tol) break;
        }
        if (n > theta_detail::max_terms) throw ConvergenceError("ramanujan: term cap exceeded");
    }
    return {acc.value(), 2 * n + 1, tail, SeriesRegime::direct};
}

}  // namespace

SeriesValue ramanujan_f(double a, double b, double tol) { return ramanujan(a, b, tol, false); }

SeriesValue ramanujan_g(double a, double b, double tol) { return ramanujan(a, b, tol, true); }

double ramanujan_relation_residual(double u, double mu, double tol) {
    check_theta_args(u, mu, tol);
    const double a = std::exp(-u * (1.0 + mu)), b = std::exp(-u * (1.0 - mu));
    const double th = theta_mu(u, mu, tol / 4).value;
    return std::abs(th - ramanujan_g(a, b, tol / 4).value - mu / 2.0 * ramanujan_f(a, b, tol / 4).value);
}

}  // namespace rankgap
