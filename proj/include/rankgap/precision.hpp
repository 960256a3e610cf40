#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/mpfr.hpp>

#include "rankgap/errors.hpp"
#include "rankgap/series.hpp"

namespace rankgap::precision {

template <unsigned Digits>
using mpfr_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                                boost::multiprecision::et_off>;

template <class Real>
struct TermValue {
    Real value;
    Real abs;
};

template <class Real>
struct SeriesSum {
    Real value;
    double abs_sum = 0.0;
    int last = 0;
    double tail = 0.0;
};

constexpr int max_pairs = 100000;

// Sums term(m) for m = first, first+1, ... . Stops once env(m) and env(m+1)
// are both below trunc_tol/10 and the geometric tail bound is below
// trunc_tol, or exactly at fixed_last when that is nonnegative.
template <class Real, class Term, class Env>
SeriesSum<Real> pair_sum(Term&& term, Env&& env, int first, double trunc_tol, int fixed_last = -1) {
    CompensatedSum<Real> acc;
    double abs_sum = 0.0;
    double tail = std::numeric_limits<double>::infinity();
    int m = first;
    for (;; ++m) {
        const TermValue<Real> t = term(m);
        acc.add(t.value);
        abs_sum += static_cast<double>(t.abs);
        if (fixed_last >= 0) {
            if (m >= fixed_last) {
                tail = geometric_tail(env(m + 1), env(m + 2), env(m + 3));
                break;
            }
            continue;
        }
        if (m >= first + 2 && env(m) < trunc_tol / 10 && env(m + 1) < trunc_tol / 10) {
            tail = geometric_tail(env(m + 1), env(m + 2), env(m + 3));
            if (tail <= trunc_tol) break;
        }
        if (m - first > max_pairs) throw ConvergenceError("series: pair cap exceeded without convergence");
    }
    return {acc.value(), abs_sum, m, tail};
}

struct Evaluation {
    double value = 0.0;
    double abs_sum = 0.0;
    int last = 0;
    double tail = 0.0;
    double rounding = 0.0;
    int digits = 16;
};

// Relative rounding per term, including the error of exp() at exponents of a
// few hundred.
constexpr double rounding_factor = 64.0;

// Evaluates f in double; re-evaluates with the same truncation in MPFR at
// increasing precision until the rounding estimate is below a quarter of the
// target max(abs_tol, rel_tol |value|).
// f(tag, trunc_tol, fixed_last) returns SeriesSum<decltype(tag)>.
template <class F>
Evaluation evaluate(F&& f, double abs_tol, double rel_tol) {
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0))
        throw DomainError("tolerance must be positive");
    const double trunc = rel_tol > 0.0 ? std::max(abs_tol, 1e-290) : abs_tol;
    auto target = [&](double v) { return std::max({abs_tol, rel_tol * std::abs(v), 1e-300}); };
    const SeriesSum<double> d = f(double{}, trunc, -1);
    Evaluation e{d.value, d.abs_sum, d.last, d.tail, 0.0, 16};
    const double eps = std::numeric_limits<double>::epsilon();
    e.rounding = rounding_factor * eps * (d.abs_sum + std::abs(d.value));
    if (e.rounding <= target(d.value) / 4) return e;

    auto run = [&](auto tag, int digits) {
        const auto s = f(tag, trunc, d.last);
        e.value = static_cast<double>(s.value);
        e.tail = s.tail;
        e.digits = digits;
        e.rounding = rounding_factor * std::pow(10.0, -digits) * (d.abs_sum + std::abs(e.value));
        return e.rounding <= target(e.value) / 4;
    };
    const double need = std::log10(d.abs_sum / target(d.value)) + 6;
    if (need <= 50 && run(mpfr_real<50>{}, 50)) return e;
    if (need <= 100 && run(mpfr_real<100>{}, 100)) return e;
    if (need <= 200 && run(mpfr_real<200>{}, 200)) return e;
    if (run(mpfr_real<400>{}, 400)) return e;
    throw ConvergenceError("series: cancellation exceeds 400 significant digits");
}

}  // namespace rankgap::precision
