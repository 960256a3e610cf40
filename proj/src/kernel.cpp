#include "rankgap/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rankgap/errors.hpp"

namespace rankgap {

using std::numbers::pi;

Complex principal_sqrt(Complex z) {
    if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
    return std::sqrt(z);
}

Complex require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError(std::string(what) + ": non-finite result");
    return z;
}

double require_finite(double z, const char* what) {
    if (!std::isfinite(z)) throw DomainError(std::string(what) + ": non-finite result");
    return z;
}

BranchPoints branch_points(const ModelParams& p) {
    const double L = p.lambda_sum;
    return {p.lambda2 * p.lambda2 / (4.0 * L), p.lambda1 * p.lambda1 / (4.0 * L)};
}

Complex branch_A1(Complex y, Branch sign, const ModelParams& p) {
    const double l1 = p.lambda1;
    const Complex r = principal_sqrt(l1 * l1 / 4.0 - p.lambda_sum * y);
    const Complex base = -l1 / 2.0 + y;
    return require_finite(sign == Branch::plus ? base + r : base - r, "branch_A1");
}

Complex branch_A2(Complex x, Branch sign, const ModelParams& p) {
    const double l2 = p.lambda2;
    const Complex r = principal_sqrt(l2 * l2 / 4.0 - p.lambda_sum * x);
    const Complex base = -l2 / 2.0 + x;
    return require_finite(sign == Branch::plus ? base + r : base - r, "branch_A2");
}

Complex parabola_P2_point(double x, const ModelParams& p) {
    const double xp = branch_points(p).x_plus;
    if (!(x >= xp)) throw DomainError("parabola_P2_point: x below the branch point x+");
    const double s = std::sqrt(p.lambda_sum * x - p.lambda2 * p.lambda2 / 4.0);
    return {-p.lambda2 / 2.0 + x, s};
}

double parabola_P2_excess(Complex y, const ModelParams& p) {
    return p.lambda_sum * y.real() + p.lambda2 * (2.0 * p.lambda1 + p.lambda2) / 4.0 -
           y.imag() * y.imag();
}

Region classify_D2(Complex y, const ModelParams& p) {
    const double e = parabola_P2_excess(y, p);
    const double scale = 1.0 + std::abs(p.lambda_sum * y.real()) + y.imag() * y.imag();
    if (std::abs(e) <= 1e-12 * scale) return Region::boundary;
    return e > 0.0 ? Region::inside : Region::outside;
}

Complex conformal_W(Complex y, const ModelParams& p) {
    const double L = p.lambda_sum;
    const Complex arg = y / L - p.lambda1 * p.lambda1 / (4.0 * L * L);
    const Complex c = cos_pi_sqrt(-arg);
    return require_finite(c * c, "conformal_W");
}

Complex conformal_W_inv(Complex z, const ModelParams& p) {
    if (z.imag() == 0.0 && z.real() <= 0.0)
        throw DomainError("conformal_W_inv: argument on the slit (-inf, 0]");
    const double L = p.lambda_sum;
    const Complex s = principal_sqrt(z) - principal_sqrt(z - 1.0);
    const Complex l = std::log(s);
    return require_finite(branch_points(p).y_plus + (L / (pi * pi)) * l * l, "conformal_W_inv");
}

Complex decoupling_residual(Complex x, Complex y, const ModelParams& p) {
    const Complex lhs = (x - y / 2.0) * decoupling_D1(y, p) - (y - x / 2.0) * decoupling_D2(x, p);
    const Complex rhs = 0.5 *
                        (x * x - y * y + (p.lambda1 + 2.0 * p.lambda2) * x -
                         (2.0 * p.lambda1 + p.lambda2) * y) *
                        kernel_K(x, y, p);
    return lhs - rhs;
}

Complex boundary_ratio_G(Complex y, const ModelParams& p) {
    const Complex a = branch_A1(y, Branch::plus, p);
    const Complex yc = std::conj(y);
    const Complex d1 = 2.0 * y - a;
    const Complex d2 = 2.0 * a - yc;
    const double scale = 1e-14 * (1.0 + std::abs(a) + std::abs(y));
    if (std::abs(d1) <= scale || std::abs(d2) <= scale)
        throw SingularityError("boundary_ratio_G: pole of the ratio", y);
    return require_finite(((2.0 * a - y) / d1) * ((2.0 * yc - a) / d2), "boundary_ratio_G");
}

double cos_pi_sqrt(double w) {
    if (std::abs(w) < 1e-8) {
        const double t = pi * pi * w;
        return 1.0 - t / 2.0 + t * t / 24.0;
    }
    if (w >= 0.0) return std::cos(pi * std::sqrt(w));
    return std::cosh(pi * std::sqrt(-w));
}

Complex cos_pi_sqrt(Complex w) {
    if (w.imag() == 0.0) return cos_pi_sqrt(w.real());
    if (std::abs(w) < 1e-8) {
        const Complex t = pi * pi * w;
        return 1.0 - t / 2.0 + t * t / 24.0;
    }
    return std::cos(pi * principal_sqrt(w));
}

namespace {

template <class T>
T sinc(const T& z) {
    if (std::abs(z) < 1e-4) {
        const T z2 = z * z;
        return T(1.0) - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

}  // namespace

double cos_pi_sqrt_diff(double mu, double d) {
    const double w = mu * mu + d;
    if (w < 0.0) return std::cosh(pi * std::sqrt(-w)) - std::cos(pi * mu);
    const double r = std::sqrt(w) + mu;
    const double z = pi * d / (2.0 * r);
    return -2.0 * std::sin(pi * r / 2.0) * z * sinc(z);
}

Complex cos_pi_sqrt_diff(double mu, Complex d) {
    if (d.imag() == 0.0) return cos_pi_sqrt_diff(mu, d.real());
    const Complex r = principal_sqrt(mu * mu + d) + mu;
    const Complex z = pi * d / (2.0 * r);
    return -2.0 * std::sin(pi * r / 2.0) * z * sinc(z);
}

}  // namespace rankgap
