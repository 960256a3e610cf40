#pragma once

#include <array>
#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>

#include "rankgap/errors.hpp"
#include "rankgap/series.hpp"

namespace rankgap::theta_detail {

constexpr int max_terms = 1000000;

template <class Real>
struct Partial {
    Real value;
    int terms = 0;
    double tail = 0.0;
};

// Weights w[k] multiply the k-th u-derivative of u -> theta_mu(exp(-s u)),
// k = 0..3; every theta quantity in the library is such a combination.
using Weights = std::array<double, 4>;

inline double weight_poly_bound(const Weights& w, double x) {
    return std::abs(w[0]) + std::abs(w[1]) * x + std::abs(w[2]) * x * x + std::abs(w[3]) * x * x * x;
}

// sum_k w_k (-e s)^k, the factor a direct-series term exp(-e s u) picks up.
template <class Real>
Real direct_factor(const Weights& w, const Real& e, const Real& s) {
    using std::abs;
    const Real y = -e * s;
    const Real f = Real(w[0]) + y * (Real(w[1]) + y * (Real(w[2]) + y * Real(w[3])));
    // the weights carry double rounding; a factor below that level is a root of the operator
    const Real ay = abs(y);
    const Real m = abs(Real(w[0])) + ay * (abs(Real(w[1])) + ay * (abs(Real(w[2])) + ay * abs(Real(w[3]))));
    if (abs(f) <= 64 * std::numeric_limits<double>::epsilon() * m) return Real(0);
    return f;
}

// Direct series sum_{n in Z} (n + mu/2) q^{n(n+mu)}, q = exp(-s u), with terms
// n and -n paired. fixed_pairs >= 0 forces the number of pairs.
template <class Real>
Partial<Real> direct_sum(const Real& u, const Real& mu, const Weights& w, const Real& s, double tol,
                         int fixed_pairs = -1) {
    using std::exp;
    const Real v = s * u;
    CompensatedSum<Real> acc;
    acc.add(mu / 2 * direct_factor(w, Real(0), s));
    const double vd = static_cast<double>(v), md = static_cast<double>(mu), sd = static_cast<double>(s);
    // envelope of pair n, using |n + mu/2| <= 2n and n(n+mu) <= 2n^2
    auto envelope = [&](int n) {
        const double x = 2.0 * n * double(n) * sd;
        return 2.0 * n * weight_poly_bound(w, x) * std::exp(-n * (n - md) * vd);
    };
    int n = 1;
    double tail = std::numeric_limits<double>::infinity();
    for (;; ++n) {
        const Real nn(n);
        const Real ep = nn * (nn + mu), em = nn * (nn - mu);
        acc.add((nn + mu / 2) * direct_factor(w, ep, s) * exp(-ep * v) +
                (-nn + mu / 2) * direct_factor(w, em, s) * exp(-em * v));
        if (fixed_pairs >= 0) {
            if (n >= fixed_pairs) break;
            continue;
        }
        if (n >= 3) {
            const double e1 = envelope(n + 1);
            if (e1 < tol / 10) {
                tail = geometric_tail(e1, envelope(n + 2), envelope(n + 3));
                if (tail <= tol) break;
            }
        }
        if (n > max_terms) throw ConvergenceError("theta direct series: term cap exceeded");
    }
    if (fixed_pairs >= 0) tail = geometric_tail(envelope(n + 1), envelope(n + 2), envelope(n + 3));
    return {acc.value(), 2 * n + 1, tail};
}

// Transformed series: theta_mu(e^{-v}) = 2 pi^{3/2} sum_{n>=1} n sin(pi mu n) g_n(v),
// g_n(v) = v^{-3/2} exp(mu^2 v/4 - pi^2 n^2 / v); derivatives in u carry s^k.
template <class Real>
Partial<Real> transformed_sum(const Real& u, const Real& mu, const Weights& w, const Real& s, double tol,
                              int fixed_terms = -1) {
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    const Real pi = boost::math::constants::pi<Real>();
    const Real v = s * u;
    const Real base = -Real(1.5) * log(v) + mu * mu * v / 4;
    const Real pref = 2 * pi * sqrt(pi);
    const Real s2 = s * s, s3 = s2 * s;
    CompensatedSum<Real> acc;
    const double vd = static_cast<double>(v), md = static_cast<double>(mu), sd = static_cast<double>(s);
    const double pid = boost::math::constants::pi<double>();
    // |phi^(k)| <= alpha_k n^2 for n >= 1
    const double a1 = 1.5 / vd + md * md / 4 + pid * pid / (vd * vd);
    const double a2 = 1.5 / (vd * vd) + 2 * pid * pid / (vd * vd * vd);
    const double a3 = 3 / (vd * vd * vd) + 6 * pid * pid / (vd * vd * vd * vd);
    const std::array<double, 4> dk = {1.0, a1, a2 + a1 * a1, a3 + 3 * a1 * a2 + a1 * a1 * a1};
    const double gbase = -1.5 * std::log(vd) + md * md * vd / 4;
    auto envelope = [&](int n) {
        double b = 0.0, sk = 1.0;
        const double n2 = double(n) * n;
        double nk = 1.0;
        for (int k = 0; k < 4; ++k) {
            b += std::abs(w[k]) * sk * dk[k] * nk;
            sk *= sd;
            nk *= n2;
        }
        const double e = std::exp(gbase - pid * pid * n2 / vd);
        if (e == 0.0) return 0.0;
        return 2 * std::pow(pid, 1.5) * n * b * e;
    };
    int n = 1;
    double tail = std::numeric_limits<double>::infinity();
    for (;; ++n) {
        const Real c = pi * pi * Real(n) * Real(n);
        const Real g = exp(base - c / v);
        if (g == Real(0)) {
            // every later term underflows as well
            tail = 0.0;
            break;
        }
        const Real p1 = -Real(1.5) / v + mu * mu / 4 + c / (v * v);
        const Real p2 = Real(1.5) / (v * v) - 2 * c / (v * v * v);
        const Real p3 = -Real(3) / (v * v * v) + 6 * c / (v * v * v * v);
        Real f = Real(w[0]);
        if (w[1] != 0.0) f += Real(w[1]) * s * p1;
        if (w[2] != 0.0) f += Real(w[2]) * s2 * (p2 + p1 * p1);
        if (w[3] != 0.0) f += Real(w[3]) * s3 * (p3 + 3 * p1 * p2 + p1 * p1 * p1);
        acc.add(Real(n) * sin(pi * mu * Real(n)) * g * f);
        if (fixed_terms >= 0) {
            if (n >= fixed_terms) break;
            continue;
        }
        if (n >= 3) {
            const double e1 = envelope(n + 1);
            if (e1 < tol / 10) {
                tail = geometric_tail(e1, envelope(n + 2), envelope(n + 3));
                if (tail <= tol) break;
            }
        }
        if (n > max_terms) throw ConvergenceError("theta transformed series: term cap exceeded");
    }
    if (fixed_terms >= 0 && tail != 0.0) tail = geometric_tail(envelope(n + 1), envelope(n + 2), envelope(n + 3));
    return {pref * acc.value(), n, tail};
}

}  // namespace rankgap::theta_detail
