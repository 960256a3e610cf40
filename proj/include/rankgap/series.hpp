#pragma once

#include <cmath>
#include <limits>

namespace rankgap {

// Neumaier-compensated accumulator; works for any real type with abs().
template <class Real>
class CompensatedSum {
public:
    void add(const Real& x) {
        using std::abs;
        const Real t = sum_ + x;
        if (abs(sum_) >= abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        abs_ += abs(x);
    }
    Real value() const { return sum_ + comp_; }
    Real abs_sum() const { return abs_; }

private:
    Real sum_ = Real(0);
    Real comp_ = Real(0);
    Real abs_ = Real(0);
};

// Tail bound for sum_{m>N} E_m given E_{N+1}, E_{N+2}, E_{N+3}, assuming the
// ratio E_{m+1}/E_m is nonincreasing from N+1 on. Infinity when the ratios do
// not yet certify geometric decay.
inline double geometric_tail(double e1, double e2, double e3) {
    if (e1 == 0.0) return 0.0;
    const double rho = e2 / e1;
    if (!(rho < 1.0)) return std::numeric_limits<double>::infinity();
    if (e2 > 0.0 && e3 / e2 > rho * (1.0 + 1e-12)) return std::numeric_limits<double>::infinity();
    return e1 / (1.0 - rho);
}

}  // namespace rankgap
