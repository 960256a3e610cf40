#pragma once

#include <cmath>

#include "rankgap/params.hpp"
#include "rankgap/precision.hpp"

namespace rankgap::series {

using precision::TermValue;

// Compensation sequences (a_n, b_n, c_n) for parameters (l1, l2); the primed
// sequences are the same objects for the swapped parameters.
template <class Real>
struct Compensation {
    Real l1, l2, L, mu;  // mu = mu2 = l2/L

    explicit Compensation(const ModelParams& p)
        : l1(p.lambda1), l2(p.lambda2), L(l1 + l2), mu(l2 / L) {}

    Real a_even(long n) const {
        const Real a0 = 4 * l1 + 6 * l2;
        const Real nn(n);
        return a0 + 4 * nn * L + nn * nn * l1 + nn * (nn + 1) * l2;
    }
    Real b_even(long n) const {
        const Real b0 = 2 * l1 + 4 * l2;
        const Real nn(n);
        return b0 + 4 * nn * L + nn * (nn - 1) * l1 + nn * nn * l2;
    }
    Real a(long n) const { return a_even(n / 2); }
    Real b(long n) const { return n % 2 == 0 ? b_even(n / 2) : b_even(n / 2 + 1); }
    Real c(long n) const {
        const Real x(n);
        const Real den = 3072 * mu * (1 + mu) * (2 + mu) * (3 + mu);
        const Real m2 = 2 * mu;
        if (n % 2 == 0)
            return (x + 2) * (x + 4) * (x + 4) * (x + 6) * (x + m2) * (x + 2 + m2) * (x + 4 + m2) *
                   (x + 6 + m2) / den;
        return -(x + 1) * (x + 3) * (x + 5) * (x + 7) * (x + 1 + m2) * (x + 3 + m2) * (x + 3 + m2) *
               (x + 5 + m2) / den;
    }
    Real C() const { return 4 * (l1 + 2 * l2) * (2 * l1 + 3 * l2) * (3 * l1 + 4 * l2) / l1; }
};

// Coefficients of the bi-infinite boundary series for side 1 of p:
// nu_1(u) = sum_n W(n) exp(-n(n+mu1) L u).
template <class Real>
struct BoundarySeries {
    Real l1, l2, L, mu, scale;

    explicit BoundarySeries(const ModelParams& p) : l1(p.lambda1), l2(p.lambda2), L(l1 + l2), mu(l1 / L) {
        scale = -4 * L * L * L * L / (3 * l1 * l2);
    }
    Real weight(long n) const {
        const Real x(n);
        return scale * (x - 1) * x * (x + 1) * (x - 1 + mu) * (x + mu) * (x + 1 + mu) * (x + mu / 2);
    }
    Real rate(long n) const {
        const Real x(n);
        return x * (x + mu) * L;
    }
};

inline double boundary_pair_envelope(const ModelParams& p, long m, double u) {
    const BoundarySeries<double> s(p);
    return (std::abs(s.weight(m)) + std::abs(s.weight(-m))) * std::exp(-s.rate(-m) * u);
}

// Sum of the pair (2m, 2m+1) of C p(u, v) for the sequence of params q.
template <class Real>
TermValue<Real> compensation_pair(const Compensation<Real>& s, const Real& C, long m, const Real& u,
                                  const Real& v) {
    using std::exp;
    using std::abs;
    const Real e = exp(-s.a_even(m) * u);
    const Real t0 = C * s.c(2 * m) * e * exp(-s.b_even(m) * v);
    const Real t1 = C * s.c(2 * m + 1) * e * exp(-s.b_even(m + 1) * v);
    return {t0 + t1, abs(t0) + abs(t1)};
}

inline double compensation_pair_envelope(const ModelParams& q, long m, double u, double v) {
    const Compensation<double> s(q);
    return s.C() * (std::abs(s.c(2 * m)) + std::abs(s.c(2 * m + 1))) *
           std::exp(-s.a_even(m) * u - s.b_even(m) * v);
}

}  // namespace rankgap::series
