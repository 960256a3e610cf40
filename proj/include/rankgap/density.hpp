#pragma once

#include <vector>

#include <Eigen/Core>

#include "rankgap/params.hpp"

namespace rankgap {

struct CompensationTables {
    Eigen::ArrayXd a, b, c;
    Eigen::ArrayXd ap, bp, cp;
    double C = 0.0;
    double Cp = 0.0;
    int N = 0;
};

// Closed-form tables, indices 0..N.
CompensationTables compensation_tables(const ModelParams& p, int N);
// The same c and c' sequences from the two-step recursion (cross-check only).
void compensation_c_recursive(const ModelParams& p, int N, Eigen::ArrayXd& c, Eigen::ArrayXd& cp);
// c_{2n} + c_{2n+1} in closed form.
double compensation_pair_closed(const ModelParams& p, int n);

struct DensityValue {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;
    double rounding_bound = 0.0;
    int working_digits = 16;
};

// Smallest admissible L(u+v) for the compensation series.
constexpr double pi_density_min_scaled_sum = 1e-3;

// tol is absolute; the target is max(tol, rel_tol |value|).
DensityValue pi_density(double u, double v, const ModelParams& p, double tol, double rel_tol = 0.0);

enum class NuMethod { bi_infinite, theta_operator, symmetric };

DensityValue nu_density(int side, double u, const ModelParams& p, NuMethod method, double tol,
                        double rel_tol = 0.0);

struct ExpTerm {
    double weight;
    double rate;
};

// Terms of the boundary series of nu_side, |n| <= n_max, sorted by rate.
std::vector<ExpTerm> nu_series_terms(int side, const ModelParams& p, int n_max);
// Terms of the symmetric-case series, n = 3 .. 2 + count.
std::vector<ExpTerm> nu_symmetric_terms(const ModelParams& p, int count);

DensityValue marginal_G_density(double u, const ModelParams& p, double tol, double rel_tol = 0.0);
DensityValue marginal_H_density(double u, const ModelParams& p, double tol, double rel_tol = 0.0);
double marginal_G_cdf(double u, const ModelParams& p);
double marginal_H_cdf(double u, const ModelParams& p);

// Below this value of L u the marginals switch from term-wise series to the
// theta closed forms.
constexpr double marginal_series_min_scaled = 0.25;

namespace density_detail {
DensityValue marginal_G_density_series(double u, const ModelParams& p, double tol, double rel_tol);
DensityValue marginal_G_density_theta(double u, const ModelParams& p, double tol);
double marginal_G_cdf_series(double u, const ModelParams& p);
double marginal_G_cdf_theta(double u, const ModelParams& p);
}  // namespace density_detail

// int_0^z nu_side / total mass, via the theta antiderivative.
double nu_cdf(int side, double z, const ModelParams& p);

// Density of G+H in the symmetric case: nu_1/(2 lambda).
DensityValue sigma_density(double z, const ModelParams& p, double tol, double rel_tol = 0.0);
double sigma_cdf(double z, const ModelParams& p);

struct ResidualValue {
    double residual = 0.0;
    bool ill_conditioned = false;
};

// Fourth-order finite-difference residual of the dual generator applied to
// pi, scaled by |pi|.
ResidualValue pde_residual(double u, double v, const ModelParams& p, double h);
// Oblique boundary operator residual: side 1 is the face u = 0 (coordinate v),
// side 2 the face v = 0 (coordinate u).
ResidualValue boundary_residual(int side, double coordinate, const ModelParams& p, double h);

}  // namespace rankgap
