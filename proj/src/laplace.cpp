#include "rankgap/laplace.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "rankgap/errors.hpp"

namespace rankgap {

using std::numbers::pi;

namespace {

void check_poles(Complex y, double mu, double L) {
    // poles at -k(k+mu)L; find the k nearest to the real root of k^2 + mu k + y/L = 0
    const double disc = mu * mu - 4.0 * y.real() / L;
    if (disc < 0.0) return;
    const double r = std::sqrt(disc);
    for (double root : {(-mu + r) / 2.0, (-mu - r) / 2.0}) {
        for (double kk : {std::floor(root), std::ceil(root)}) {
            const int k = static_cast<int>(kk);
            if (k >= -1 && k <= 1) continue;
            const double pole = -k * (k + mu) * L;
            if (std::abs(y - pole) < 1e-10 * std::max(1.0, std::abs(pole)))
                throw SingularityError("nu_hat: argument at a pole of the transform", pole, k);
        }
    }
}

Complex sinc(Complex z) {
    if (std::abs(z) < 1e-3) {
        const Complex z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

// 1/sin(pi x), kept finite for large |Im x|.
Complex csc_pi(Complex x) {
    const Complex i(0.0, 1.0);
    if (x.imag() > 1.0) return -2.0 * i * std::exp(i * pi * x) / (1.0 - std::exp(2.0 * i * pi * x));
    if (x.imag() < -1.0) return 2.0 * i * std::exp(-i * pi * x) / (1.0 - std::exp(-2.0 * i * pi * x));
    return 1.0 / std::sin(pi * x);
}

// x(x^2-1)/sin(pi x); the zeros at -1, 0, 1 are removed analytically.
Complex removable_ratio(Complex x) {
    const double m = std::round(x.real());
    if (std::abs(m) <= 1.0 && std::abs(x - m) < 0.25) {
        const Complex g = m == 0.0 ? x * x - 1.0 : m == 1.0 ? x * (x + 1.0) : x * (x - 1.0);
        const double sign = m == 0.0 ? 1.0 : -1.0;
        return sign * g / (pi * sinc(pi * (x - m)));
    }
    return x * (x * x - 1.0) * csc_pi(x);
}

// (4 pi/(3 l1 l2)) sin(pi mu) D1(y) / (cos(pi s) - cos(pi mu)) with s = sqrt(mu^2 - 4y/L).
// With t = (s - mu)/2 one has y = -t(t+mu)L, D1 = -L^3 t(t^2-1) (t+mu)((t+mu)^2-1) and
// the denominator is -2 sin(pi t) sin(pi(t+mu)).
Complex nu1_closed(Complex y, const ModelParams& p) {
    const double l1 = p.lambda1, l2 = p.lambda2, L = p.lambda_sum, mu = p.mu1;
    check_poles(y, mu, L);
    const double pref = 4.0 * pi / (3.0 * l1 * l2) * std::sin(pi * mu);
    const Complex s = principal_sqrt(mu * mu - 4.0 * y / L);
    const Complex t = -2.0 * y / (L * (s + mu));
    const Complex v = pref * L * L * L / 2.0 * removable_ratio(t) * removable_ratio(t + mu);
    return y.imag() == 0.0 ? Complex(v.real(), 0.0) : v;
}

}  // namespace

TransformValue nu1_hat(Complex y, const ModelParams& p) {
    return {require_finite(nu1_closed(y, p), "nu1_hat"), TransformMethod::trig_closed_form, std::nullopt};
}

TransformValue nu2_hat(Complex x, const ModelParams& p) {
    auto r = nu1_hat(x, p.swapped());
    return r;
}

TransformValue nu_hat(int side, Complex y, const ModelParams& p) {
    check_side(side);
    return side == 1 ? nu1_hat(y, p) : nu2_hat(y, p);
}

double nu_rate(int k, double mu, double L) { return k * (k + mu) * L; }

double reciprocal_rate_tail(double mu, int n) {
    using boost::math::digamma;
    return (digamma(n + 1.0 + mu) - digamma(n + 1.0 - mu)) / mu;
}

TransformValue nu1_hat_product(double y, const ModelParams& p, int n_factors) {
    if (n_factors < 10) throw UsageError("nu1_hat_product: need at least 10 factors");
    const double L = p.lambda_sum, mu = p.mu1;
    const double first_pole = nu_rate(-2, mu, L);
    if (!(y > -first_pole)) throw DomainError("nu1_hat_product: y must lie above the first pole");
    double log_sum = 0.0, comp = 0.0;
    for (int m = n_factors; m >= 2; --m) {
        // smallest terms first
        for (int k : {m, -m}) {
            const double t = std::log1p(y / nu_rate(k, mu, L)) - comp;
            const double s = log_sum + t;
            comp = (s - log_sum) - t;
            log_sum = s;
        }
    }
    const double tail = y * reciprocal_rate_tail(mu, n_factors) / L;
    const double v = nu_mass(1, p) * std::exp(-log_sum - tail);
    return {require_finite(Complex(v, 0.0), "nu1_hat_product"), TransformMethod::infinite_product, n_factors};
}

TransformValue nu2_hat_product(double x, const ModelParams& p, int n_factors) {
    return nu1_hat_product(x, p.swapped(), n_factors);
}

TransformValue pi_hat(Complex x, Complex y, const ModelParams& p) {
    if (x == 0.0 && y == 0.0) return {Complex(1.0, 0.0), TransformMethod::via_BAR, std::nullopt};
    const Complex k = kernel_K(x, y, p);
    const double scale = std::norm(x - y) + p.lambda1 * std::abs(x) + p.lambda2 * std::abs(y);
    if (std::abs(k) <= 1e-14 * scale)
        throw SingularityError("pi_hat: kernel vanishes", x);
    const Complex num = (x - y / 2.0) * nu1_hat(y, p).value + (y - x / 2.0) * nu2_hat(x, p).value;
    return {require_finite(num / k, "pi_hat"), TransformMethod::via_BAR, std::nullopt};
}

Complex ml_shifted_cosine_partial(Complex s, double mu, int n_terms) {
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("ml_shifted_cosine_partial: need mu in (0,1)");
    if (n_terms < 0) throw UsageError("ml_shifted_cosine_partial: n_terms must be nonnegative");
    const Complex s2 = s * s;
    auto term = [&](int n) {
        const double t = 1.0 + 2.0 * n / mu;
        const Complex d = s2 - t * t;
        if (std::abs(d) <= 1e-14 * (1.0 + t * t))
            throw SingularityError("ml_shifted_cosine_partial: s hits a pole", s, n);
        return t / d;
    };
    Complex acc = 0.0;
    for (int n = n_terms; n >= 1; --n) acc += term(n) + term(-n);
    acc += term(0);
    return -2.0 / (mu * std::sin(pi * mu)) * acc;
}

double nu_mass(int side, const ModelParams& p) {
    check_side(side);
    return side == 1 ? 2.0 / 3.0 * (2.0 * p.lambda1 + p.lambda2) : 2.0 / 3.0 * (2.0 * p.lambda2 + p.lambda1);
}

double nu_mean(int side, const ModelParams& p) {
    return reciprocal_rate_tail(p.mu(side), 1) / p.lambda_sum;
}

}  // namespace rankgap
