#include "rankgap/integrals.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/expm1.hpp>

#include "rankgap/density_series.hpp"
#include "rankgap/errors.hpp"
#include "rankgap/laplace.hpp"
#include "rankgap/precision.hpp"

namespace rankgap {

using precision::TermValue;

namespace {

double chernoff(double delta, double L, auto&& transform) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 60; ++j) {
        const double t = L * std::pow(2.0, j / 3.0);
        const double b = std::exp(t * delta) * transform(t);
        if (std::isfinite(b)) best = std::min(best, b);
    }
    return best;
}

// int int_{u+v >= d} e^{-a u - b v} du dv
template <class Real>
Real corner_complement(const Real& a, const Real& b, const Real& d) {
    using std::exp;
    using boost::math::expm1;
    const Real diff = a - b;
    if (diff == 0) return exp(-b * d) * (1 + b * d) / (a * b);
    return exp(-b * d) * (1 - b * expm1(-diff * d) / diff) / (a * b);
}

}  // namespace

double nu_corner_bound(int side, const ModelParams& p, double delta) {
    return chernoff(delta, p.lambda_sum, [&](double t) { return nu_hat(side, t, p).value.real(); });
}

double pi_corner_bound(const ModelParams& p, double delta) {
    return chernoff(delta, p.lambda_sum, [&](double t) { return pi_hat(t, t, p).value.real(); });
}

IntegralValue pi_mass(const ModelParams& p) {
    const double delta = corner_scaled_cut / p.lambda_sum;
    const ModelParams q = p.swapped();
    auto env = [&](int m) {
        const series::Compensation<double> s(p), t(q);
        auto one = [&](const series::Compensation<double>& x) {
            // over u+v = r >= delta: e^{-min(a,b) r} r dr
            const double k = std::min(x.a_even(m), x.b_even(m));
            return x.C() * (std::abs(x.c(2 * m)) + std::abs(x.c(2 * m + 1))) * std::exp(-k * delta) *
                   (1 + k * delta) / (k * k);
        };
        return one(s) + one(t);
    };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        using std::abs;
        const series::Compensation<Real> s(p), t(q);
        const Real C = s.C(), Cp = t.C(), D(delta);
        auto term = [&](int m) {
            Real v(0), a(0);
            for (const auto* x : {&s, &t}) {
                const Real K = x == &s ? C : Cp;
                const Real t0 = K * x->c(2 * m) * corner_complement(x->a_even(m), x->b_even(m), D);
                const Real t1 = K * x->c(2 * m + 1) * corner_complement(x->a_even(m), x->b_even(m + 1), D);
                v += t0 + t1;
                a += abs(t0) + abs(t1);
            }
            return TermValue<Real>{v, a};
        };
        return precision::pair_sum<Real>(term, env, 0, trunc, fixed);
    };
    const auto e = precision::evaluate(f, 1e-15, 0.0);
    return {e.value, e.tail + e.rounding + pi_corner_bound(p, delta), 2 * (e.last + 1)};
}

IntegralValue nu_moment(int side, const ModelParams& p, int moment, double s) {
    check_side(side);
    if (moment != 0 && moment != 1) throw UsageError("nu_moment: moment must be 0 or 1");
    const ModelParams q = side == 1 ? p : p.swapped();
    const double L = q.lambda_sum;
    if (!(s < nu_rate(-2, q.mu1, L))) throw DomainError("nu_moment: exponential weight beyond the first rate");
    const double delta = corner_scaled_cut / L;
    auto env = [&](int m) {
        const series::BoundarySeries<double> b(q);
        const double r = b.rate(-m) - s;
        const double j = std::exp(-r * delta) * (moment == 0 ? 1 / r : delta / r + 1 / (r * r));
        return (std::abs(b.weight(m)) + std::abs(b.weight(-m))) * j;
    };
    auto f = [&](auto tag, double trunc, int fixed) {
        using Real = decltype(tag);
        using std::exp;
        using std::abs;
        const series::BoundarySeries<Real> b(q);
        const Real D(delta), S(s);
        auto J = [&](const Real& rate) {
            const Real r = rate - S;
            return exp(-r * D) * (moment == 0 ? 1 / r : D / r + 1 / (r * r));
        };
        auto term = [&](int m) {
            const Real t0 = b.weight(m) * J(b.rate(m)), t1 = b.weight(-m) * J(b.rate(-m));
            return TermValue<Real>{t0 + t1, abs(t0) + abs(t1)};
        };
        return precision::pair_sum<Real>(term, env, 2, trunc, fixed);
    };
    const auto e = precision::evaluate(f, 1e-15, 0.0);
    const double corner = std::pow(delta, moment) * std::exp(std::max(s, 0.0) * delta) * nu_corner_bound(1, q, delta);
    return {e.value, e.tail + e.rounding + corner, 2 * (e.last - 1)};
}

}  // namespace rankgap
