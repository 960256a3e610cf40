#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "rankgap/params.hpp"

namespace testing {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
inline double rel(std::complex<double> a, std::complex<double> b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline rankgap::ModelParams sym() { return rankgap::params_from_lambdas(1.0, 1.0); }
inline rankgap::ModelParams fig() { return rankgap::params_from_lambdas(1.0 / 6.0, 5.0 / 6.0); }
inline rankgap::ModelParams skew() { return rankgap::params_from_lambdas(0.3, 1.7); }

}  // namespace testing
