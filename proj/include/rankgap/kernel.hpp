#pragma once

#include <complex>

#include "rankgap/params.hpp"

namespace rankgap {

using Complex = std::complex<double>;

enum class Branch { plus, minus };

struct BranchPoints {
    double x_plus;
    double y_plus;
};

template <class S>
S kernel_K(const S& x, const S& y, const ModelParams& p) {
    const S d = x - y;
    return d * d + S(p.lambda1) * x + S(p.lambda2) * y;
}

template <class S>
S kernel_Kstar(const S& a, const S& b, const ModelParams& p) {
    const S d = a - b;
    return d * d - S(p.lambda1) * a - S(p.lambda2) * b;
}

// D1(y) = y(y+lambda2)(y+2lambda1+lambda2); D2 is the swap.
template <class S>
S decoupling_D1(const S& y, const ModelParams& p) {
    return y * (y + S(p.lambda2)) * (y + S(2.0 * p.lambda1 + p.lambda2));
}

template <class S>
S decoupling_D2(const S& x, const ModelParams& p) {
    return x * (x + S(p.lambda1)) * (x + S(2.0 * p.lambda2 + p.lambda1));
}

BranchPoints branch_points(const ModelParams& p);

Complex branch_A1(Complex y, Branch sign, const ModelParams& p);
Complex branch_A2(Complex x, Branch sign, const ModelParams& p);

Complex parabola_P2_point(double x, const ModelParams& p);
// L Re y + lambda2(2lambda1+lambda2)/4 - (Im y)^2; zero on P2, positive inside D2.
double parabola_P2_excess(Complex y, const ModelParams& p);

enum class Region { inside, boundary, outside };
Region classify_D2(Complex y, const ModelParams& p);

Complex conformal_W(Complex y, const ModelParams& p);
Complex conformal_W_inv(Complex z, const ModelParams& p);

Complex decoupling_residual(Complex x, Complex y, const ModelParams& p);

Complex boundary_ratio_G(Complex y, const ModelParams& p);

// cos(pi sqrt(w)), an entire even function of sqrt(w).
double cos_pi_sqrt(double w);
Complex cos_pi_sqrt(Complex w);

// cos(pi sqrt(mu^2 + d)) - cos(pi mu) without cancellation for small d.
double cos_pi_sqrt_diff(double mu, double d);
Complex cos_pi_sqrt_diff(double mu, Complex d);

// Principal square root with -0.0 imaginary parts read as +0.0, so that
// points exactly on the cut take the upper-side value.
Complex principal_sqrt(Complex z);

Complex require_finite(Complex z, const char* what);
double require_finite(double z, const char* what);

}  // namespace rankgap
